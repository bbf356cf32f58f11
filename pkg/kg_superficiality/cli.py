"""
The ``kgsim`` entry point: the six subcommands of manage.py behind one executable.

``dispatch`` never raises; it returns 0 on success, 1 when a run fails (a model
constraint, unreadable input) and 2 on a usage error.
"""
import logging
import os
import sys

import django
from django.core.management import get_commands, load_command_class

from kg_superficiality.apps.core.constants import SUBCOMMANDS


logger = logging.getLogger(__name__)

PROG = 'kgsim'
DEFAULT_SETTINGS = 'kg_superficiality.settings.local'
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
HELP_FLAGS = ('-h', '--help', 'help')


def load_subcommand(name):
    """
    Returns the management command instance behind a subcommand name.
    """
    return load_command_class(get_commands()[name], name)


def usage():
    lines = [f'usage: {PROG} <subcommand> [options]', '', 'subcommands:']
    for name in SUBCOMMANDS:
        summary = load_subcommand(name).help.split('. ')[0].rstrip('.')
        lines.append(f'  {name:<11}{summary}')
    lines.append('')
    lines.append(f'Run "{PROG} <subcommand> --help" for the options of a subcommand.')
    return '\n'.join(lines)


def _exit_code(code):
    if code is None:
        return EXIT_OK
    if isinstance(code, int):
        return code
    # sys.exit('message') prints the message and exits with status 1.
    return EXIT_FAILURE


def dispatch(argv=None):
    """
    Runs ``argv`` (without the program name) as a kgsim subcommand and returns the exit code.
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', DEFAULT_SETTINGS)
    django.setup()

    if not argv or argv[0] in HELP_FLAGS:
        stream = sys.stdout if argv else sys.stderr
        stream.write(usage() + '\n')
        return EXIT_OK if argv else EXIT_USAGE
    name = argv[0]
    if name not in SUBCOMMANDS:
        sys.stderr.write(f'{PROG}: unknown subcommand {name!r}\n\n{usage()}\n')
        return EXIT_USAGE

    command = load_subcommand(name)
    try:
        command.run_from_argv([PROG, name, *argv[1:]])
    except SystemExit as exc:
        return _exit_code(exc.code)
    except Exception:  # pylint: disable=broad-except
        logger.exception('%s %s failed unexpectedly', PROG, name)
        return EXIT_FAILURE
    return EXIT_OK
