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

from rally.common import cfg
from rally.task import context

from rally_doa.contexts.doa import context as common_context

CONF = cfg.CONF

OVERRIDABLE = ("threads", "error_cap", "tolerance", "min_separation",
               "max_sampling_attempts")


@context.configure("doa.cfg", order=500)
class CfgContext(common_context.BaseDoaContext):
    """Context to override [doa] config opts for the duration of a task."""

    CONFIG_SCHEMA = {
        "type": "object",
        "additionalProperties": False,
        "properties": {
            "threads": {
                "type": "integer",
                "minimum": 0
            },
            "error_cap": {
                "type": "number",
                "exclusiveMinimum": 0
            },
            "tolerance": {
                "type": "number",
                "exclusiveMinimum": 0
            },
            "min_separation": {
                "type": "number",
                "minimum": 0
            },
            "max_sampling_attempts": {
                "type": "integer",
                "minimum": 1
            }
        }
    }

    def setup(self):
        self.context["doa"]["cfg"] = dict(
            (name, getattr(CONF.doa, name)) for name in OVERRIDABLE)
        for name in OVERRIDABLE:
            if self.config.get(name) is not None:
                CONF.set_override(name, self.config[name], "doa")

    def cleanup(self):
        for name, value in self.context["doa"].get("cfg", {}).items():
            CONF.set_override(name, value, "doa")
