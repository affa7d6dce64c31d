"""Shared plumbing of the arrangement commands: file IO and exit codes."""

from contextlib import contextmanager
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError
from pydantic import ValidationError

from arrangements.exceptions import GeometryError, NotMaximalError
from arrangements.models import Arrangement, PartitionReport
from arrangements.services.codec import read_file, write_file

VERIFICATION_FAILED = 1
USAGE_ERROR = 2


class ArrangementCommand(BaseCommand):
    """Base for commands that read and write interchange files."""

    requires_system_checks = []

    def add_input(self, parser):
        parser.add_argument("--in", dest="input", required=True, help="Arrangement or report file")

    def add_output(self, parser, required=True):
        parser.add_argument("--out", dest="output", required=required, help="File to write")

    def load(self, path) -> object:
        with self.library_errors():
            return read_file(path)

    def load_arrangement(self, path) -> Arrangement:
        document = self.load(path)
        if not isinstance(document, Arrangement):
            raise CommandError(f"{path} holds a report, not an arrangement", returncode=USAGE_ERROR)
        return document

    def save(self, path, obj):
        try:
            write_file(path, obj)
        except OSError as exc:
            raise CommandError(f"cannot write {path}: {exc.strerror}", returncode=USAGE_ERROR) from exc
        self.stdout.write(f"wrote {Path(path)}")

    def report_line(self, report: PartitionReport) -> str:
        state = "tight" if report.tight else ("ok" if report.satisfied else "VIOLATED")
        return (
            f"{report.bound_name}: m={report.m} T={report.T} b={report.b} "
            f"observed={report.observed} limit={report.bound_value} ({state})"
        )

    @contextmanager
    def library_errors(self):
        """Turn library errors into CommandError with the documented exit codes."""
        try:
            yield
        except NotMaximalError as exc:
            raise CommandError(str(exc), returncode=VERIFICATION_FAILED) from exc
        except ValidationError as exc:
            first = exc.errors()[0]
            where = ".".join(str(part) for part in first["loc"]) or exc.title
            raise CommandError(f"{where}: {first['msg']}", returncode=USAGE_ERROR) from exc
        except GeometryError as exc:
            raise CommandError(str(exc), returncode=USAGE_ERROR) from exc
        except OSError as exc:
            raise CommandError(f"{exc.filename}: {exc.strerror}", returncode=USAGE_ERROR) from exc
