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
from rally.task import context

from rally_doa.services.doa import doa as doa_service


@plugin.default_meta(inherit=False)
class BaseDoaContext(context.Context):

    CONFIG_SCHEMA = {"type": "object", "additionalProperties": False}

    def __init__(self, context=None):
        super(BaseDoaContext, self).__init__(context)
        self.context.setdefault("doa", {})
        self.service = doa_service.DoaService(
            name_generator=self.generate_random_name,
            atomic_inst=self.atomic_actions()
        )
