from typing import Sequence, TextIO

from ehrfan.management.commands.ehrfan import Command


def run_command(
    argv: Sequence[str],
    stdout: TextIO | None = None,
    stderr: TextIO | None = None,
) -> int:
    """
    Run ``ehrfan <group> <action> ...`` as the command line would and
    return its exit code. The JSON document goes to ``stdout``.
    """
    command = Command(stdout=stdout, stderr=stderr)
    try:
        command.run_from_argv(["manage.py", "ehrfan", *argv])
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    return 0
