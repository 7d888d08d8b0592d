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

from rally.common.plugin import plugin
from rally.task import scenario

from rally_doa.array import dataset as doa_dataset
from rally_doa.common import runconfig
from rally_doa.services.doa import doa as doa_service
from rally_doa import exceptions


@plugin.default_meta(inherit=False)
class BaseDoaScenario(scenario.Scenario):

    def __init__(self, context=None):
        super(BaseDoaScenario, self).__init__(context)
        self.context.setdefault("doa", {})
        self.service = doa_service.DoaService(
            name_generator=self.generate_random_name,
            atomic_inst=self.atomic_actions())

    def run_config(self, **sections):
        """Run configuration of the context, with per-section overrides.

        None values inside an override section are dropped.
        """
        overrides = dict(
            (name, dict((k, v) for k, v in values.items() if v is not None))
            for name, values in sections.items())
        return runconfig.RunConfig(runconfig.merge(
            self.context["doa"].get("run_config") or {}, overrides))

    def dataset(self, role):
        path = self.context["doa"].get("datasets", {}).get(role)
        if path is None:
            raise exceptions.InvalidArgument(
                "no '%s' dataset in the task context; add the doa_dataset "
                "context with a non-zero '%s' count" % (role, role))
        return doa_dataset.DoaDataset.load(path)

    def add_metrics_output(self, title, report):
        self.add_output(
            additive={"title": title,
                      "description": "Matched and raw errors per iteration",
                      "chart_plugin": "StackedArea",
                      "data": [["rmse_matched", report.rmse_matched],
                               ["rmse_raw", report.rmse_raw],
                               ["ospa_linear", report.ospa_linear]],
                      "label": "Degrees",
                      "axis_label": "Iteration"})
        self.add_output(
            complete={"title": "%s report" % title,
                      "chart_plugin": "Table",
                      "data": {"cols": ["Metric", "Value"],
                               "rows": [[k, v] for k, v in
                                        sorted(report.to_dict().items())]}})

    def add_curve_output(self, title, history, label="Loss"):
        """Line chart of (epoch, value...) records."""
        self.add_output(
            complete={"title": title,
                      "chart_plugin": "Lines",
                      "data": [[label, [[r[0], r[-1]] for r in history]]],
                      "label": label,
                      "axis_label": "Epoch"})
