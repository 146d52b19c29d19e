from MertensLab.serializers import SeriesConfigSerializer

from ._base import LabCommand


class Command(LabCommand):
    help = "Evaluate a root series or progression, a closed form, or a ratio probe over a grid of n."
    command = "series"
    serializer_class = SeriesConfigSerializer
    formats = ("csv", "json", "plotdata")

    def add_run_arguments(self, parser):
        target = parser.add_mutually_exclusive_group()
        target.add_argument("--family", help="F1, F2, F4, PHI1, PHI2 or PHI4.")
        target.add_argument("--probe", help="K1, K2, K3 or K4.")
        target.add_argument("--closed-form", dest="closed_form", help="S1 or S4.")
        parser.add_argument("--mode", help="REAL (default) or FLOORED.")
        parser.add_argument("--grid", "--n", dest="grid", help="Comma-separated ascending n values.")
