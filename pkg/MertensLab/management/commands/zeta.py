from MertensLab.serializers import ZetaConfigSerializer

from ._base import LabCommand


class Command(LabCommand):
    help = "Direct and summation-by-parts partial sums of sum mu(n) n^-s for one or more sigma."
    command = "zeta"
    serializer_class = ZetaConfigSerializer
    formats = ("csv", "json", "plotdata")

    def add_run_arguments(self, parser):
        parser.add_argument("--sigma", help="Comma-separated real parts (> 0).")
        parser.add_argument("--t", help="Imaginary part (default 0).")
        parser.add_argument("--N", dest="N", help="Last partial sum index.")
        parser.add_argument("--checkpoints", help="Comma-separated ascending N checkpoints.")
        parser.add_argument("--c", help="Constant c (> 1) of the comparison bounds (default 1.3).")
