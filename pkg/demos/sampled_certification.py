"""Certification on a basis where the weight-matrix route is unavailable.

The five dimensional algebra with the doubled bracket target fails the
nice-basis check, so the certifier over weight matrices refuses it and
the sampled route is the only linear-programming option.  The script
certifies a derivation well inside the cone, cross-checks the
certificate with a metric witness, and then shows the honest outcome
for a derivation sitting on the boundary of the attainable set: the
margin test declines and the metric search tops out at eigenvalue zero.
"""

import numpy as np

from rnlie import (RnWitness, SearchFailure, SrnCertificate, Unknown,
                   certify_srn_nice, certify_srn_sampled, corpus,
                   is_ricci_negative, orbit_sample, search_rn_metric)
from rnlie.errors import PreconditionError

b = corpus("tricky5").bracket

print("== why sampling: the basis is not nice ==")
try:
    certify_srn_nice(np.diag([1.0, 1.0, 2.0, 2.0, 3.0]), b)
except PreconditionError as exc:
    print("weight-matrix certifier refused:", exc)

print()
print("== a derivation well inside the cone ==")
D_in = np.diag([1.0, 1.0, 2.0, 2.0, 3.0])
sample = orbit_sample("TorusCentralizer", b, count=32, seed=17)
res = certify_srn_sampled(D_in, b, sample)
assert isinstance(res, SrnCertificate)
print("certificate method:", res.method)
print("margin:", float(res.margin))
used = {i: float(v) for i, v in res.coefficients.items() if v > 0}
print("support size:", len(used), "coefficient mass:", round(sum(used.values()), 4))

search = search_rn_metric(D_in, b, seed=3)
assert isinstance(search, RnWitness)
flag, lam = is_ricci_negative(D_in, b, search.params)
print("search witness top eigenvalue:", round(search.lambda_max, 6),
      "reproduced:", round(lam, 6), "negative:", flag)

print()
print("== a derivation on the boundary stays inconclusive ==")
D_edge = np.diag([1.0, -1.0, 0.0, 0.0, 1.0])
edge_sample = orbit_sample("DerivationCentralizer", b, count=16, seed=3,
                           derivation=D_edge)
edge = certify_srn_sampled(D_edge, b, edge_sample)
assert isinstance(edge, Unknown)
print("sampled margin test:", type(edge).__name__, "-", edge.reason)

hunt = search_rn_metric(D_edge, b, budget=4000, seed=3)
assert isinstance(hunt, SearchFailure)
print("metric search: no witness in", hunt.evaluations, "evaluations,",
      "best top eigenvalue", round(hunt.lambda_best, 9))
print("the search cannot push the top eigenvalue below zero, and the")
print("margin test must not pretend otherwise: points of the sampled")
print("image are first sorted into one fundamental domain, and inside")
print("that domain no combination covers this derivation with margin")
