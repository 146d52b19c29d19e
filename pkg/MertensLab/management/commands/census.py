from MertensLab.serializers import CensusConfigSerializer

from ._base import LabCommand


class Command(LabCommand):
    help = "Count the unit, primes, non-squarefree and squarefree (even/odd) numbers in [1, n] together with M(n)."
    command = "census"
    serializer_class = CensusConfigSerializer

    def add_run_arguments(self, parser):
        parser.add_argument("--n", help="Upper end of the census.")
