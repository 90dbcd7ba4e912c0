from importlib import metadata
from pathlib import Path


VERSION_FILE = Path(__file__).with_name("VERSION")
"""Version file shipped inside the package (see ``package_data`` in setup.py)"""


def get_version_number(version_file: Path = VERSION_FILE) -> str:
    """
    Return the current version number

    Args:
        version_file (Path) = VERSION_FILE: File holding the version string. When
            it is missing the installed distribution metadata is used instead

    Returns:
        str: The current version number as a string
    """
    if version_file.is_file():
        return version_file.read_text().strip()
    return metadata.version("lagexp")


__version__ = get_version_number()
"""Current Version"""
