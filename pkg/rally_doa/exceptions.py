# All Rights Reserved.
#
#    Licensed under the Apache License, Version 2.0 (the "License"); you may
#    not use this file except in compliance with the License. You may obtain
#    a copy of the License at
#
#         http://www.apache.org/licenses/LICENSE-2.0
#
#    Unless required by applicable law or agreed to in writing, software
#    distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
#    WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
#    License for the specific language governing permissions and limitations
#    under the License.

from rally import exceptions


EXIT_USAGE = 2
EXIT_MISMATCH = 3
EXIT_NUMERIC = 4


class DoaException(exceptions.RallyException):
    error_code = 700
    exit_code = EXIT_MISMATCH
    msg_fmt = "%(message)s"


class InvalidArgument(DoaException):
    error_code = 701
    exit_code = EXIT_USAGE
    msg_fmt = "Invalid argument: %(message)s"


class InvalidGeometry(DoaException):
    error_code = 702
    msg_fmt = "Operation '%(operation)s' requires %(expected)s geometry, " \
              "got %(actual)s"


class DimensionMismatch(DoaException):
    error_code = 703
    msg_fmt = "Dimension mismatch: %(message)s"


class InfeasibleSpec(DoaException):
    error_code = 704
    msg_fmt = "Could not place %(count)s sources with minimum separation " \
              "%(min_sep)s deg inside %(fov)s after %(attempts)s attempts"


class InvalidLabel(DoaException):
    error_code = 705
    msg_fmt = "Label %(label)s lies outside the field of view %(fov)s"


class DegreesOfFreedom(DoaException):
    error_code = 706
    msg_fmt = "MUSIC needs fewer sources than elements: K=%(sources)s, " \
              "M=%(elements)s"


class NotHermitian(DoaException):
    error_code = 707
    msg_fmt = "Matrix is not Hermitian (max asymmetry %(residual)s)"


class ContractError(DoaException):
    error_code = 708
    msg_fmt = "Contract violated: %(message)s"


class DatasetFormatError(DoaException):
    error_code = 709
    msg_fmt = "Malformed file '%(path)s': %(message)s"


class EmptyInput(DoaException):
    error_code = 710
    msg_fmt = "Empty input: %(message)s"


class NumericFailure(DoaException):
    error_code = 720
    exit_code = EXIT_NUMERIC
    msg_fmt = "Non-finite values produced by %(operation)s"


class GradCheckFailure(DoaException):
    error_code = 721
    exit_code = EXIT_NUMERIC
    msg_fmt = "Gradient check failed: %(message)s"


class TrainingAborted(DoaException):
    error_code = 722
    exit_code = EXIT_NUMERIC
    msg_fmt = "Training aborted at epoch %(epoch)s: %(reason)s"

    def __init__(self, params=None, history=None, **kwargs):
        self.params = params
        self.history = history or []
        super(TrainingAborted, self).__init__(**kwargs)


class OutputError(DoaException):
    error_code = 723
    exit_code = EXIT_USAGE
    msg_fmt = "Cannot write '%(path)s': %(message)s"
