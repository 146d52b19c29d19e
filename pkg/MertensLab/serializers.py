from django.db import transaction
from rest_framework import serializers

from .compute.claims_harness import DEFAULT_C_VALUES
from .compute.series_lab import ClosedForm, Probe, SeriesFamily, SeriesMode
from .models import AuditRun, ClaimVerdictRecord


# =========================
# Run configuration
# =========================

class CommaListField(serializers.ListField):
    """List field that also accepts "a,b,c" strings from flags and config files."""

    def to_internal_value(self, data):
        if isinstance(data, str):
            data = [part.strip() for part in data.split(",") if part.strip()]
        elif not isinstance(data, (list, tuple)):
            data = [data]
        return super().to_internal_value(list(data))


class RangeField(serializers.Field):
    """Inclusive integer range written as "lo:hi"."""

    default_error_messages = {
        "invalid": 'Expected a range "lo:hi" with integers lo >= 1.',
    }

    def to_internal_value(self, data):
        if isinstance(data, (list, tuple)) and len(data) == 2:
            lo, hi = data
        else:
            lo, sep, hi = str(data).partition(":")
            if not sep:
                self.fail("invalid")
        try:
            lo, hi = int(lo), int(hi)
        except (TypeError, ValueError):
            self.fail("invalid")
        if lo < 1:
            self.fail("invalid")
        return (lo, hi)

    def to_representation(self, value):
        return [value[0], value[1]]


def _ascending(values, name):
    if any(b <= a for a, b in zip(values, values[1:])):
        raise serializers.ValidationError({name: "Values must be strictly ascending."})


class RunConfigSerializer(serializers.Serializer):
    """
    Settings shared by every command. Subclasses add the command's own fields
    and list the output formats it can write.
    """
    formats = ("csv", "json")
    # excluded from the config echo written into reports
    run_only_fields = ("workers", "output", "format", "save", "config")

    segment_size = serializers.IntegerField(min_value=2 ** 16)
    workers = serializers.IntegerField(min_value=1)
    max_n = serializers.IntegerField(min_value=1)
    max_segment_size = serializers.IntegerField(min_value=2 ** 16)
    output = serializers.CharField(required=False, allow_null=True, default=None)
    format = serializers.ChoiceField(choices=["csv", "json", "plotdata", "pdf"], default="csv")

    def validate_format(self, value):
        if value not in self.formats:
            raise serializers.ValidationError(
                f"'{value}' is not available here; choose one of {', '.join(self.formats)}."
            )
        return value

    def scan_options(self):
        data = self.validated_data
        return {
            "segment_size": data["segment_size"],
            "workers": data["workers"],
            "max_n": data["max_n"],
        }

    def config_echo(self):
        return {
            key: (list(value) if isinstance(value, tuple) else value)
            for key, value in sorted(self.validated_data.items())
            if key not in self.run_only_fields
        }


class CensusConfigSerializer(RunConfigSerializer):
    n = serializers.IntegerField(min_value=1)


class MertensConfigSerializer(RunConfigSerializer):
    formats = ("csv", "json", "plotdata")

    n = serializers.IntegerField(min_value=1)
    checkpoints = CommaListField(child=serializers.IntegerField(min_value=1), required=False, default=list)
    start = serializers.IntegerField(min_value=1, default=1)

    def validate(self, attrs):
        checkpoints = attrs.get("checkpoints") or []
        _ascending(checkpoints, "checkpoints")
        if checkpoints and checkpoints[-1] > attrs["n"]:
            raise serializers.ValidationError({"checkpoints": f"Checkpoints must not exceed n={attrs['n']}."})
        if attrs["start"] > attrs["n"]:
            raise serializers.ValidationError({"start": f"start must not exceed n={attrs['n']}."})
        return attrs


class SeriesConfigSerializer(RunConfigSerializer):
    formats = ("csv", "json", "plotdata")

    family = serializers.ChoiceField(choices=[f.value for f in SeriesFamily], required=False, allow_null=True, default=None)
    probe = serializers.ChoiceField(choices=[p.value for p in Probe], required=False, allow_null=True, default=None)
    closed_form = serializers.ChoiceField(choices=[c.value for c in ClosedForm], required=False, allow_null=True, default=None)
    mode = serializers.ChoiceField(choices=[m.value for m in SeriesMode], default=SeriesMode.REAL.value)
    grid = CommaListField(child=serializers.IntegerField(min_value=1), min_length=1)

    def validate(self, attrs):
        chosen = [key for key in ("family", "probe", "closed_form") if attrs.get(key)]
        if len(chosen) != 1:
            raise serializers.ValidationError("Give exactly one of family, probe or closed_form.")
        if attrs["mode"] == SeriesMode.FLOORED.value and not attrs.get("family"):
            raise serializers.ValidationError({"mode": "FLOORED mode applies to series families only."})
        _ascending(attrs["grid"], "grid")
        return attrs


class ClaimsConfigSerializer(RunConfigSerializer):
    id = serializers.CharField(max_length=64)
    c = CommaListField(child=serializers.FloatField(), required=False, default=list)
    range = RangeField()

    def validate_c(self, value):
        for c in value:
            if not c > 1:
                raise serializers.ValidationError(f"c must be > 1 (got {c}).")
        return value


class ZetaConfigSerializer(RunConfigSerializer):
    formats = ("csv", "json", "plotdata")

    sigma = CommaListField(child=serializers.FloatField(), min_length=1)
    t = serializers.FloatField(default=0.0)
    N = serializers.IntegerField(min_value=1)
    checkpoints = CommaListField(child=serializers.IntegerField(min_value=1), required=False, default=list)
    c = serializers.FloatField(default=1.3)

    def validate_sigma(self, value):
        for sigma in value:
            if not sigma > 0:
                raise serializers.ValidationError(f"sigma must be > 0 (got {sigma}).")
        return sorted(set(value))

    def validate_c(self, value):
        if not value > 1:
            raise serializers.ValidationError(f"c must be > 1 (got {value}).")
        return value

    def validate(self, attrs):
        checkpoints = attrs.get("checkpoints") or []
        _ascending(checkpoints, "checkpoints")
        if checkpoints and checkpoints[-1] > attrs["N"]:
            raise serializers.ValidationError({"checkpoints": f"Checkpoints must not exceed N={attrs['N']}."})
        return attrs


class AuditConfigSerializer(RunConfigSerializer):
    formats = ("json", "pdf")

    n_max = serializers.IntegerField(min_value=10)
    c = CommaListField(child=serializers.FloatField(), required=False, default=lambda: list(DEFAULT_C_VALUES))
    sigma = CommaListField(child=serializers.FloatField(), required=False, default=lambda: [0.5, 0.6, 0.75])
    save = serializers.BooleanField(default=False)
    format = serializers.ChoiceField(choices=["json", "pdf"], default="json")

    def validate_c(self, value):
        for c in value:
            if not c > 1:
                raise serializers.ValidationError(f"c must be > 1 (got {c}).")
        return sorted(set(value))

    def validate_sigma(self, value):
        for sigma in value:
            if not sigma > 0:
                raise serializers.ValidationError(f"sigma must be > 0 (got {sigma}).")
        return sorted(set(value))

    def validate(self, attrs):
        if attrs["format"] == "pdf" and not attrs.get("output"):
            raise serializers.ValidationError({"output": "PDF reports need an output file."})
        return attrs


# =========================
# Result representations
# =========================

class ClaimVerdictSerializer(serializers.Serializer):
    claim_id = serializers.CharField()
    range = serializers.SerializerMethodField()
    holds = serializers.BooleanField(source="holds_everywhere")
    first_violation = serializers.IntegerField(allow_null=True)
    worst_margin = serializers.FloatField()
    argmax_n = serializers.IntegerField(allow_null=True)

    def get_range(self, obj):
        return [obj.n_range[0], obj.n_range[1]]


class CensusSerializer(serializers.Serializer):
    n = serializers.IntegerField()
    ones = serializers.IntegerField()
    primes = serializers.IntegerField()
    nonsquarefree = serializers.IntegerField()
    squarefree_even = serializers.IntegerField()
    squarefree_odd = serializers.IntegerField()
    mertens = serializers.IntegerField()


class MertensTraceSerializer(serializers.Serializer):
    n = serializers.IntegerField()
    start = serializers.IntegerField()
    values = serializers.SerializerMethodField()
    max_abs_ratio = serializers.FloatField()
    argmax_abs = serializers.IntegerField()
    max_ratio = serializers.FloatField()
    argmax = serializers.IntegerField()
    min_ratio = serializers.FloatField()
    argmin = serializers.IntegerField()

    def get_values(self, obj):
        return [{"n": n, "mertens": m} for n, m in zip(obj.grid, obj.values)]


class SeriesSampleSerializer(serializers.Serializer):
    family = serializers.CharField(source="spec.family.value")
    mode = serializers.CharField(source="spec.mode.value")
    n = serializers.IntegerField(source="spec.n")
    value = serializers.SerializerMethodField()
    term_count = serializers.IntegerField()

    def get_value(self, obj):
        return obj.value


class RatioTraceSerializer(serializers.Serializer):
    probe = serializers.CharField(source="probe.value")
    points = serializers.SerializerMethodField()

    def get_points(self, obj):
        return [{"n": n, "ratio": r} for n, r in zip(obj.grid, obj.ratios)]


def _pair(z):
    return [z.real, z.imag]


class PartialSumTraceSerializer(serializers.Serializer):
    sigma = serializers.FloatField(source="s.sigma")
    t = serializers.FloatField(source="s.t")
    c = serializers.FloatField(allow_null=True)
    claimed_constant = serializers.FloatField(allow_null=True)
    points = serializers.SerializerMethodField()

    def get_points(self, obj):
        harmonic = obj.harmonic_bound or (None,) * len(obj.grid)
        return [
            {
                "N": N,
                "direct": _pair(direct),
                "abel": _pair(abel),
                "boundary_abs": boundary,
                "harmonic_bound": bound,
            }
            for N, direct, abel, boundary, bound in zip(
                obj.grid, obj.direct_values, obj.abel_values, obj.boundary_abs, harmonic
            )
        ]


# =========================
# Persistence
# =========================

class ClaimVerdictRecordSerializer(serializers.ModelSerializer):
    class Meta:
        model = ClaimVerdictRecord
        exclude = ("run",)


class AuditRunSerializer(serializers.ModelSerializer):
    verdicts = ClaimVerdictRecordSerializer(many=True)

    class Meta:
        model = AuditRun
        fields = "__all__"
        read_only_fields = ("id", "created_at", "updated_at", "verdict_count", "all_hold")

    @transaction.atomic
    def create(self, validated_data):
        verdicts_data = validated_data.pop("verdicts", [])
        run = AuditRun.objects.create(
            verdict_count=len(verdicts_data),
            all_hold=all(v["holds"] for v in verdicts_data),
            **validated_data,
        )
        for verdict_data in verdicts_data:
            ClaimVerdictRecord.objects.create(run=run, **verdict_data)
        return run
