"""Random transition systems with counterexamples for property tests."""

import random

from backresp.ts import validate_counterexample, validate_system
from backresp.tsr import Model


def random_model(rng: random.Random, n: int, max_out: int = 3, bad_fraction: float = 0.25) -> Model:
    """Random system on ``n`` states with a loop-free run from 0 into a bad state."""
    while True:
        n_bad = max(1, int(n * bad_fraction))
        bad = set(rng.sample(range(1, n), n_bad))
        trans = []
        for s in range(n):
            k = rng.randint(1, max_out)
            trans += [(s, t) for t in rng.sample(range(n), min(k, n))]
        ts = validate_system(n, trans, 0, bad)
        run = _random_run(rng, ts)
        if run is not None:
            return Model(ts, validate_counterexample(ts, run))


def _random_run(rng, ts, tries=20):
    for _ in range(tries):
        run = [ts.initial]
        seen = {ts.initial}
        while run[-1] not in ts.bad:
            options = [t for t in ts.successors[run[-1]] if t not in seen]
            if not options:
                break
            nxt = rng.choice(options)
            run.append(nxt)
            seen.add(nxt)
        if run[-1] in ts.bad:
            return run
    return None


def random_models(seed: int, count: int, sizes=range(2, 10), **kw):
    rng = random.Random(seed)
    return [random_model(rng, rng.choice(list(sizes)), **kw) for _ in range(count)]
