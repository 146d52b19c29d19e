from MertensLab.serializers import MertensConfigSerializer

from ._base import LabCommand


class Command(LabCommand):
    help = "Mertens function M(k) at ascending checkpoints k <= n."
    command = "mertens"
    serializer_class = MertensConfigSerializer
    formats = ("csv", "json", "plotdata")

    def add_run_arguments(self, parser):
        parser.add_argument("--n", help="Largest n sieved.")
        parser.add_argument("--checkpoints", help="Comma-separated ascending checkpoints (default: n).")
        parser.add_argument("--start", help="First n used for the M(n)/sqrt(n) extremes (default 1).")
