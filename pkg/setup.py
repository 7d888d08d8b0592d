# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
# implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import os
import setuptools
from setuptools import find_packages


def read_data(filename):
    filename = os.path.join(os.path.dirname(__file__), filename)
    with open(filename) as f:
        return f.read()


def read_requirements(filename):
    return [line.split("#")[0].strip()
            for line in read_data(filename).split("\n")
            if line.strip() and not line.startswith("#")]


EXTRAS_REQUIREMENTS = {
    "test": read_requirements("test-requirements.txt")
}


setuptools.setup(
    setup_requires=["setuptools_scm"],
    use_scm_version={"fallback_version": "0.1.0"},
    name="rally-doa",
    packages=find_packages(exclude=["tests", "tests.*"]),
    description="Direction-of-arrival estimation with a from-scratch "
                "transformer, transfer-learning calibration and MUSIC, "
                "packaged as Rally plugins and a command line tool.",
    long_description=read_data("README.md"),
    long_description_content_type="text/markdown",
    license="Apache License, Version 2.0",
    entry_points={
        "rally_plugins": [
            "path = rally_doa",
            "options = rally_doa.common.opts:list_opts"
        ],
        "console_scripts": [
            "doa = rally_doa.cmd.main:main"
        ]
    },
    install_requires=read_requirements("requirements.txt"),
    extras_require=EXTRAS_REQUIREMENTS,
    python_requires=">=3.8",
    classifiers=["Intended Audience :: Developers",
                 "Intended Audience :: Science/Research",
                 "License :: OSI Approved :: Apache Software License",
                 "Operating System :: POSIX :: Linux",
                 "Programming Language :: Python",
                 "Programming Language :: Python :: 3",
                 "Topic :: Scientific/Engineering"]
)
