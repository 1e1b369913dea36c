# coding=utf-8

########################################################################################################################

# The distribution name, has to be unique on the package index
project_name = "depthtcm"

# The python package holding the library and the command line entry point
project_package = "depthtcm"

# The project's version
# Remember to bump the version in depthtcm/__init__.py as well
project_version = "0.1.0"

# One line description shown on the package index
project_description = "Depth map compression through multiwavelength phase encoding, low-bit quantization and range coding, with a small learned transform codec."

# The project's author
project_author = "depthtcm contributors"

# The project's license
project_license = "AGPLv3"

# Runtime requirements
project_requires = ["numpy", "torch", "einops", "Pillow", "psutil", "sentry-sdk"]

### --------------------------------------------------------------------------------------------------------------------
### More advanced options that you usually shouldn't have to touch follow after this point
### --------------------------------------------------------------------------------------------------------------------

# Optional requirement groups, installable as depthtcm[<group>]
project_extras = {
    "tests": ["pytest"],
}

# Console entry points
project_entry_points = {
    "console_scripts": ["depthtcm=depthtcm.cli:main"],
}

# Any python packages within the project you do NOT want to install
project_ignored_packages = ["tests", "tests.*", "examples", "examples.*"]

########################################################################################################################

from setuptools import find_packages, setup

setup(
    name=project_name,
    version=project_version,
    description=project_description,
    author=project_author,
    license=project_license,
    packages=find_packages(exclude=project_ignored_packages),
    python_requires=">=3.8",
    install_requires=project_requires,
    extras_require=project_extras,
    entry_points=project_entry_points,
)
