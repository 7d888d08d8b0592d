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

from rally_doa.contexts.doa import cfg as cfg_context


def make_context(config):
    return {"task": {"uuid": "task-uuid"},
            "owner_id": "owner-id",
            "config": {"doa.cfg": config}}


def test_override_and_restore(conf):
    ctx = cfg_context.CfgContext(make_context({"error_cap": 45.0,
                                               "tolerance": 5.0}))
    ctx.setup()
    assert conf.doa.error_cap == 45.0
    assert conf.doa.tolerance == 5.0
    assert ctx.context["doa"]["cfg"]["error_cap"] == 30.0

    ctx.cleanup()
    assert conf.doa.error_cap == 30.0
    assert conf.doa.tolerance == 10.0


def test_unset_options_untouched(conf):
    ctx = cfg_context.CfgContext(make_context({"threads": 2}))
    ctx.setup()
    assert conf.doa.threads == 2
    assert conf.doa.error_cap == 30.0
    ctx.cleanup()
    assert conf.doa.threads == ctx.context["doa"]["cfg"]["threads"]


def test_cleanup_without_setup(conf):
    ctx = cfg_context.CfgContext(make_context({"error_cap": 45.0}))
    ctx.cleanup()
    assert conf.doa.error_cap == 30.0
