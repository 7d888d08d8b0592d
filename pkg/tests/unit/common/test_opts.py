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

from rally_doa.common import opts


def test_every_listed_group_is_registered():
    for group, options in opts.list_opts().items():
        for opt in options:
            assert getattr(getattr(cfg.CONF, group), opt.dest) == opt.default


def test_registering_again_is_harmless(conf):
    conf.set_override("tolerance", 5.0, "doa")
    opts.register_opts()
    assert conf.doa.tolerance == 5.0
    assert conf.transfer.epochs == 100
