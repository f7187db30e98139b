"""Interval-map simulation, cadlag path metrics, and stable-law verification.

Subpackages are organised by concern:

* ``maps`` -- the intermittent interval map family, observables, initial
  densities, and the invariant-density estimator.
* ``inducing`` -- first-return machinery: return times, excursions, lap
  numbers, scaled partial-sum paths.
* ``cadlag`` -- step paths, completed graphs, and certified J1/M1 distances.
* ``stable`` -- totally skewed alpha-stable laws: characteristic function,
  sampler, CDF by inversion, and stable Levy path synthesis.
* ``diagnostics`` -- statistical verification suites tying everything together.
* ``cli`` -- JSON-config batch front end.
"""

__version__ = "0.1.0"
