import numpy as np

from dualgraph import _kernels, rngutil


def test_python_and_kernel_streams_match():
    probes = [0, 1, 2, 7, 12345, 2**32, 2**63 - 1, 2**63, 2**64 - 1]
    for z in probes:
        assert rngutil.mix64(z) == int(_kernels.mix64_py(np.uint64(z)))
    for seed in probes:
        for idx in (0, 1, 2, 1000):
            assert rngutil.child_seed(seed, idx) == int(
                _kernels.child_seed_py(np.uint64(seed), np.uint64(idx))
            )
        for ctr in (0, 1, 99):
            assert rngutil.stream_u64(seed, ctr) == int(
                _kernels.stream_u64_py(np.uint64(seed), np.uint64(ctr))
            )


def test_unit_open_interval():
    for u in (0, 1, 2**64 - 1, 2**53, 12345678901234567):
        x = rngutil.u64_to_unit(u)
        assert 0.0 < x < 1.0


def test_mix64_is_bijective_on_probes():
    seen = {rngutil.mix64(z) for z in range(10000)}
    assert len(seen) == 10000


def test_trial_streams_disjoint():
    a = {rngutil.trial_seed(9, i) for i in range(1000)}
    b = {rngutil.trial_exp_key(9, i) for i in range(1000)}
    assert not (a & b)
