"""
Computational core of the lab: Möbius sieving, root series and progressions,
claim verdicts and Dirichlet partial sums. Nothing in here reads Django
settings; callers pass segment size, worker count and capacity explicitly.
"""
