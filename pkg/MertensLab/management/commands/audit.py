from django.conf import settings

from MertensLab import reports
from MertensLab.serializers import AuditConfigSerializer

from ._base import LabCommand


class Command(LabCommand):
    help = "Run every registered claim and the summary statistics up to n_max and write one report."
    command = "audit"
    serializer_class = AuditConfigSerializer
    formats = ("json", "pdf")

    def add_run_arguments(self, parser):
        parser.add_argument("--n-max", dest="n_max", help=f"Upper end of every scan (default {settings.LAB_AUDIT_N_MAX}).")
        parser.add_argument("--c", help="Comma-separated c values (default 1.1,1.2,1.3).")
        parser.add_argument("--sigma", help="Comma-separated sigma values for the partial-sum sweep.")
        parser.add_argument("--save", action="store_true", default=None, help="Store the run and its verdicts in the database.")

    def settings_defaults(self):
        return {**super().settings_defaults(), "n_max": settings.LAB_AUDIT_N_MAX}

    def run(self, config):
        reports.check_segment_cap(config)
        report, payload = reports.emit_audit(config)
        if config.validated_data["save"]:
            run = reports.save_audit(report, payload)
            self.stderr.write(self.style.SUCCESS(f"Saved audit run {run.pk} ({run.verdict_count} verdicts)"))
        return payload
