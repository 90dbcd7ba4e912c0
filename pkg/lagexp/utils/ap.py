import argparse
from pathlib import Path
from typing import Any, Callable, Optional, Sequence, Union


class FullPath(argparse.Action):
    """
    argparse.Action subclass to resolve a file path

    Takes an extra ``suffixes`` keyword: when given, the file name must end in one
    of them (case-insensitive). Directories are never accepted, lagexp only reads
    and writes single files.
    """

    def __init__(
        self, *args: Any, suffixes: Optional[Sequence[str]] = None, **kwargs: Any
    ) -> None:
        self.suffixes = tuple(suffix.lower() for suffix in suffixes or ())
        if self.suffixes and "help" in kwargs and kwargs["help"]:
            kwargs["help"] = f"{kwargs['help']} ({', '.join(self.suffixes)})"
        super().__init__(*args, **kwargs)

    def __call__(
        self,
        parse: argparse.ArgumentParser,
        namespace: argparse.Namespace,
        values: Union[str, Sequence[Any], None],
        option_string: Optional[str] = None,
    ) -> None:
        """
        Resolve the input path and check it names a file of an accepted type
        """
        full_path = Path(str(values)).resolve()
        if full_path.is_dir():
            raise argparse.ArgumentError(self, f"{full_path} is a directory")
        if self.suffixes and full_path.suffix.lower() not in self.suffixes:
            raise argparse.ArgumentError(
                self,
                f"{full_path.name} does not end in {' or '.join(self.suffixes)}",
            )
        setattr(namespace, self.dest, full_path)


class CommaSeparated(argparse.Action):
    """
    argparse.Action subclass to split ``4,4`` style values into a list

    Takes an extra ``element_type`` keyword (default ``int``) converting every
    element; ``argparse.ArgumentError`` is raised on a bad element so the usage
    error exits with code 2.
    """

    def __init__(
        self, *args: Any, element_type: Callable[[str], Any] = int, **kwargs: Any
    ) -> None:
        self.element_type = element_type
        super().__init__(*args, **kwargs)

    def __call__(
        self,
        parse: argparse.ArgumentParser,
        namespace: argparse.Namespace,
        values: Union[str, Sequence[Any], None],
        option_string: Optional[str] = None,
    ) -> None:
        """
        Split on commas and convert every element
        """
        parts = [part.strip() for part in str(values).split(",")]
        try:
            converted = [self.element_type(part) for part in parts if part]
        except ValueError:
            raise argparse.ArgumentError(self, f"invalid list: {values!r}")
        if not converted:
            raise argparse.ArgumentError(self, "expected at least one value")
        setattr(namespace, self.dest, converted)
