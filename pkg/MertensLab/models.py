from django.db import models


class BaseModel(models.Model):
    """
    Abstract base model providing audit timestamps.
    """
    created_at = models.DateTimeField(auto_now_add=True)
    updated_at = models.DateTimeField(auto_now=True)

    class Meta:
        abstract = True


class AuditRun(BaseModel):
    """
    One stored `audit --save` run. The report itself stays on disk; the row
    keeps its SHA-256 so two runs can be compared without the files.
    """
    artifact_version = models.CharField(max_length=32)
    n_max = models.BigIntegerField()
    config_echo = models.JSONField(default=dict)
    report_sha256 = models.CharField(max_length=64, db_index=True)
    verdict_count = models.PositiveIntegerField(default=0)
    all_hold = models.BooleanField(default=True)

    class Meta:
        ordering = ["-created_at"]
        indexes = [
            models.Index(fields=["artifact_version", "n_max"], name="mertenslab_run_version_idx"),
        ]

    def __str__(self):
        return f"Audit n<={self.n_max} ({self.report_sha256[:12]})"


class ClaimVerdictRecord(models.Model):
    run = models.ForeignKey(AuditRun, on_delete=models.CASCADE, related_name="verdicts")
    claim_id = models.CharField(max_length=64)
    range_lo = models.BigIntegerField()
    range_hi = models.BigIntegerField()
    holds = models.BooleanField()
    first_violation = models.BigIntegerField(null=True, blank=True)
    worst_margin = models.FloatField()
    argmax_n = models.BigIntegerField(null=True, blank=True)

    class Meta:
        ordering = ["id"]
        constraints = [
            models.UniqueConstraint(fields=["run", "claim_id"], name="mertenslab_unique_run_claim"),
        ]

    def __str__(self):
        return f"{self.claim_id}: {'holds' if self.holds else f'fails at {self.first_violation}'}"
