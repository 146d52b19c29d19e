import logging
from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError
from dotenv import dotenv_values

from MertensLab import reports
from MertensLab.compute.exceptions import (
    ArithmeticOverflowError,
    CapacityError,
    DomainError,
    InvariantViolation,
    SegmentSizeError,
)

logger = logging.getLogger(__name__)

CONFIG_ERROR = 2
COMPUTE_ERROR = 3


class LabCommand(BaseCommand):
    """
    Shared plumbing for the lab commands.

    Values are resolved flag > --config file > Django settings, validated by
    `serializer_class`, handed to the matching runner in reports, and the
    result goes to --output (atomically) or stdout. Exit status 2 means the
    run was misconfigured, 3 that the computation hit a capacity, overflow or
    invariant limit. Claim verdicts never affect it.
    """
    command = None
    serializer_class = None
    formats = ("csv", "json")

    def add_arguments(self, parser):
        parser.add_argument("--config", help="File of key = value lines; flags override it.")
        parser.add_argument("--segment-size", dest="segment_size", help="Integers sieved per segment (>= 65536).")
        parser.add_argument("--workers", help="Worker processes (>= 1).")
        parser.add_argument("--output", help="Output file; stdout when omitted.")
        parser.add_argument("--format", choices=self.formats, help=f"One of {', '.join(self.formats)}.")
        self.add_run_arguments(parser)

    def add_run_arguments(self, parser):
        pass

    def settings_defaults(self) -> dict:
        return {
            "segment_size": settings.LAB_SEGMENT_SIZE,
            "workers": settings.LAB_WORKERS,
            "max_n": settings.LAB_MAX_N,
            "max_segment_size": settings.LAB_MAX_SEGMENT_SIZE,
        }

    def read_config_file(self, path) -> dict:
        config_path = Path(path)
        if not config_path.is_file():
            raise CommandError(f"--config: no such file {config_path}", returncode=CONFIG_ERROR)
        known = set(self.serializer_class().fields)
        values = {}
        for key, value in dotenv_values(config_path).items():
            name = key[4:].lower() if key.upper().startswith("LAB_") else key.replace("-", "_")
            if name not in known:
                raise CommandError(f"--config {config_path}: unknown key '{key}'", returncode=CONFIG_ERROR)
            if value is None:
                raise CommandError(f"--config {config_path}: key '{key}' has no value", returncode=CONFIG_ERROR)
            values[name] = value
        return values

    def resolve(self, options) -> dict:
        raw = self.settings_defaults()
        if options.get("config"):
            raw.update(self.read_config_file(options["config"]))
        known = set(self.serializer_class().fields)
        raw.update({
            key: value for key, value in options.items()
            if key in known and value is not None
        })
        return raw

    def validate(self, raw):
        serializer = self.serializer_class(data=raw)
        if not serializer.is_valid():
            problems = "; ".join(
                f"{field}: {' '.join(str(m) for m in messages)}" for field, messages in serializer.errors.items()
            )
            raise CommandError(f"invalid configuration ({problems})", returncode=CONFIG_ERROR)
        return serializer

    def run(self, config) -> bytes:
        return reports.run_command(self.command, config)

    def handle(self, *args, **options):
        config = self.validate(self.resolve(options))
        try:
            payload = self.run(config)
        except (SegmentSizeError, CapacityError, ArithmeticOverflowError, InvariantViolation) as exc:
            logger.error("[%s] %s: %s", self.command, type(exc).__name__, exc)
            raise CommandError(str(exc), returncode=COMPUTE_ERROR)
        except DomainError as exc:
            raise CommandError(str(exc), returncode=CONFIG_ERROR)

        output = config.validated_data.get("output")
        try:
            reports.write_output(payload, output, self.stdout)
        except OSError as exc:
            raise CommandError(f"cannot write {output}: {exc}", returncode=CONFIG_ERROR)
        if output:
            self.stderr.write(self.style.SUCCESS(f"Wrote {output}"))
