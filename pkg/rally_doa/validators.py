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

from rally.common import validation

from rally_doa.array import imperfections
from rally_doa.array import presets

add = validation.add

DATASET_CONTEXT = "doa_dataset"


def _contexts(config):
    return config.get("contexts", config.get("context")) or {}


@validation.configure(name="required_doa_datasets")
class RequiredDoaDatasets(validation.Validator):
    """Check that the doa_dataset context produces the given roles.

    :param roles: dataset roles (train, val, test) the scenario loads
    """
    def __init__(self, roles):
        super(RequiredDoaDatasets, self).__init__()
        self.roles = roles

    def validate(self, context, config, plugin_cls, plugin_cfg):
        ctx = _contexts(config).get(DATASET_CONTEXT)
        if ctx is None:
            self.fail("The '%s' context is required by this scenario."
                      % DATASET_CONTEXT)
        name = ctx.get("preset", presets.DEFAULT_PRESET)
        if name not in presets.PRESETS:
            self.fail("Unknown scenario preset '%s'." % name)
        preset = presets.PRESETS[name]
        defaults = {"train": preset["train_count"],
                    "val": preset["val_count"],
                    "test": preset["test_count"]}
        empty = [role for role in self.roles
                 if not ctx.get(role, defaults[role])]
        if empty:
            self.fail("The '%(ctx)s' context generates no %(roles)s "
                      "records." % {"ctx": DATASET_CONTEXT,
                                    "roles": ", ".join(empty)})


@validation.configure(name="doa_ideal_source")
class IdealSourceValidator(validation.Validator):
    """Check that the source model comes from ideal-array data.

    Either `source_checkpoint` is passed or the doa_dataset context keeps
    its train set ideal.
    """

    def validate(self, context, config, plugin_cls, plugin_cfg):
        if config.get("args", {}).get("source_checkpoint"):
            return
        ctx = _contexts(config).get(DATASET_CONTEXT) or {}
        if ctx.get("rho", 0.0) > 0 and not ctx.get("ideal_train"):
            self.fail("Transfer needs an ideal source domain: set "
                      "'ideal_train: true' in the '%s' context or pass "
                      "'source_checkpoint'." % DATASET_CONTEXT)


@validation.configure(name="doa_map_keys")
class MapKeysParameterValidator(validation.Validator):
    """Check that a map parameter contains specified keys.

    :param param_name: Name of parameter to validate
    :param required: List of all required keys
    :param allowed: List of all allowed keys
    :param additional: Whether additional keys are allowed. If list of allowed
           keys are specified, defaults to False, otherwise defaults to True
    :param missed: Allow to accept optional parameter
    :param context_name: Look the parameter up in this context's config
           instead of the scenario arguments
    """
    def __init__(self, param_name, required=None, allowed=None,
                 additional=True, missed=False, context_name=None):
        super(MapKeysParameterValidator, self).__init__()
        self.param_name = param_name
        self.required = required or []
        self.allowed = allowed or []
        self.additional = additional
        self.missed = missed
        self.context_name = context_name

    def _parameter(self, config):
        if self.context_name:
            source = _contexts(config).get(self.context_name) or {}
        else:
            source = config.get("args", {})
        return source.get(self.param_name)

    def validate(self, context, config, plugin_cls, plugin_cfg):
        parameter = self._parameter(config)

        if parameter:
            keys = set(parameter.keys())
            required_diff = set(self.required) - keys
            if required_diff:
                self.fail(
                    "Required keys is missing in '%(name)s' parameter: "
                    "%(key)s" % {"name": self.param_name,
                                 "key": ", ".join(sorted(required_diff))})

            if self.allowed:
                diff = keys - set(self.allowed)
            elif not self.additional:
                diff = keys - set(self.required)
            else:
                diff = set()
            if diff:
                self.fail(
                    "Parameter '%(name)s' contains unallowed keys: "
                    "%(key)s" % {"name": self.param_name,
                                 "key": ", ".join(sorted(diff))})
        elif not self.missed:
            self.fail("'%s' parameter is not defined in the task config file"
                      % self.param_name)


FLAG_KEYS = dict(param_name="flags", allowed=list(imperfections.FLAG_NAMES),
                 missed=True, context_name=DATASET_CONTEXT)
