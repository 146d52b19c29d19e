from MertensLab.serializers import ClaimsConfigSerializer

from ._base import LabCommand


class Command(LabCommand):
    help = "Check one registered claim (every c value, or those given with --c) over a range of n."
    command = "claims"
    serializer_class = ClaimsConfigSerializer

    def add_run_arguments(self, parser):
        parser.add_argument("--id", help="Claim family or claim id, e.g. eq16, lemma1, eq16_c1.3.")
        parser.add_argument("--c", help="Comma-separated c values (> 1) for c-dependent claims.")
        parser.add_argument("--range", help='Inclusive range "lo:hi".')
