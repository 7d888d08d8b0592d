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

import os
import shutil
import tempfile

from rally.common import logging
from rally.task import context

from rally_doa.array import imperfections
from rally_doa.array import presets
from rally_doa.common import runconfig
from rally_doa.common import utils
from rally_doa.contexts.doa import context as common_context

LOG = logging.getLogger(__name__)

ROLES = ("train", "val", "test")


@context.configure("doa_dataset", order=1001)
class DatasetContext(common_context.BaseDoaContext):
    """Simulate train/val/test SCM datasets of a preset scenario.

    Files are written to a temporary directory that is removed on
    cleanup; scenarios find their paths under ``context["doa"]``.
    """

    CONFIG_SCHEMA = {
        "type": "object",
        "additionalProperties": False,
        "properties": {
            "preset": {
                "enum": presets.names()
            },
            "params": {
                "type": "string"
            },
            "snr_db": {
                "type": "number"
            },
            "snapshots": {
                "type": "integer",
                "minimum": 1
            },
            "rho": {
                "type": "number",
                "minimum": 0,
                "maximum": 1
            },
            "flags": {
                "type": "object",
                "additionalProperties": {"type": "boolean"}
            },
            "train": {
                "type": "integer",
                "minimum": 0
            },
            "val": {
                "type": "integer",
                "minimum": 0
            },
            "test": {
                "type": "integer",
                "minimum": 0
            },
            "ideal_train": {
                "type": "boolean"
            },
            "seed": {
                "type": "integer",
                "minimum": 0
            }
        }
    }

    DEFAULT_CONFIG = {"preset": presets.DEFAULT_PRESET, "rho": 0.0,
                      "ideal_train": False, "seed": 0}

    def _pick(self, *names):
        return dict((name, self.config[name]) for name in names
                    if self.config.get(name) is not None)

    def run_config(self):
        scenario = self._pick("params", "snr_db", "snapshots")
        scenario["preset"] = self.config["preset"]
        return runconfig.RunConfig({
            "scenario": scenario,
            "imperfections": self._pick("rho", "flags"),
            "counts": self._pick(*ROLES),
            "seed": self.config["seed"]})

    def setup(self):
        rc = self.run_config()
        scenario = rc.scenario()
        imp = rc.imperfections(scenario.geometry)
        workdir = tempfile.mkdtemp(prefix="rally-doa-")
        self.context["doa"].update({"workdir": workdir,
                                    "run_config": rc.data,
                                    "datasets": {}})
        for role in ROLES:
            count = rc.counts(role)
            if not count:
                continue
            role_imp = imp
            if role == "train" and self.config["ideal_train"]:
                role_imp = imperfections.ideal(scenario.geometry)
            path = os.path.join(workdir, "%s.doa" % role)
            self.service.generate_dataset(
                scenario=scenario, imp=role_imp, count=count,
                seed=utils.role_seed(rc.seed, role), output_path=path)
            self.context["doa"]["datasets"][role] = path
        LOG.info("Generated %s datasets in %s"
                 % (", ".join(sorted(self.context["doa"]["datasets"])),
                    workdir))

    def cleanup(self):
        workdir = self.context["doa"].get("workdir")
        if workdir:
            shutil.rmtree(workdir, ignore_errors=True)
