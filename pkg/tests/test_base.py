import collections

import pytest

from pulsefid import base
from pulsefid.api import bangbang, montecarlo
from pulsefid.api.bangbang import BangBangConfig
from pulsefid.api.montecarlo import InitialState, SequenceConfig
from pulsefid.exceptions import DomainError, PulseFidException
from pulsefid.noise import NoiseModel

Call = collections.namedtuple("Call", ["callback", "fn", "jobs"])


class Executor(base.Executor):
    def map(self, callback, fn, jobs):
        return Call(callback, fn, jobs)

    def close(self):
        pass


class Simulator(base.Simulator):
    def executor_connect(self, workers):
        return Executor(workers)


CONFIG = SequenceConfig(10, NoiseModel.amplitude(0.01))
BB_CONFIG = BangBangConfig(10, NoiseModel.amplitude(0.01))


class TestBlocks:
    @pytest.mark.parametrize(
        ("n_samples", "block_size", "expected"),
        [
            (5, 2, [(0, 2), (2, 4), (4, 5)]),
            (4, 2, [(0, 2), (2, 4)]),
            (1, 2048, [(0, 1)]),
            (0, 10, []),
        ],
    )
    def test_partition(self, n_samples, block_size, expected):
        assert base.blocks(n_samples, block_size) == expected

    def test_block_fields(self):
        block = base.blocks(3, 2)[1]
        assert (block.start, block.stop) == (2, 3)


class TestSimulator:
    def test_endpoints(self):
        sim = Simulator(workers=3, block_size=7)
        assert sim.block_size == 7
        assert sim.executor.workers == 3
        assert isinstance(sim.montecarlo, montecarlo.MonteCarlo)
        assert isinstance(sim.bangbang, bangbang.BangBang)
        assert sim.blocks(15) == [(0, 7), (7, 14), (14, 15)]

    def test_environment_overrides(self, monkeypatch):
        monkeypatch.setenv("PULSEFID_WORKERS", "5")
        monkeypatch.setenv("PULSEFID_BLOCK_SIZE", "64")
        sim = Simulator(workers=1, block_size=7)
        assert sim.executor.workers == 5
        assert sim.block_size == 64

    @pytest.mark.parametrize(
        ("name", "value"),
        [
            ("PULSEFID_WORKERS", "many"),
            ("PULSEFID_WORKERS", "0"),
            ("PULSEFID_BLOCK_SIZE", "1.5"),
            ("PULSEFID_BLOCK_SIZE", "0"),
        ],
    )
    def test_invalid_environment(self, monkeypatch, name, value):
        monkeypatch.setenv(name, value)
        with pytest.raises(PulseFidException):
            Simulator()

    def test_invalid_arguments(self):
        with pytest.raises(PulseFidException):
            Simulator(workers=0)
        with pytest.raises(PulseFidException):
            Simulator(block_size=0)

    def test_context_manager(self):
        with Simulator() as sim:
            assert sim.executor.workers == 1


class TestMonteCarloJobs:
    def test_ensemble_mean(self):
        call = Simulator(block_size=256).montecarlo.ensemble_mean(CONFIG, 600)
        assert call.fn is montecarlo.final_fidelities
        assert call.jobs == [(CONFIG, 0, 256), (CONFIG, 256, 512), (CONFIG, 512, 600)]

    def test_jobs_do_not_depend_on_workers(self):
        one = Simulator(workers=1, block_size=100).montecarlo.ensemble_histogram(CONFIG, 1000, 10)
        many = Simulator(workers=8, block_size=100).montecarlo.ensemble_histogram(CONFIG, 1000, 10)
        assert one.jobs == many.jobs

    def test_simulate_trajectory(self):
        call = Simulator().montecarlo.simulate_trajectory(CONFIG, 41)
        assert call.fn is montecarlo.trajectories
        assert call.jobs == [(CONFIG, 41, 42)]

    def test_trajectories(self):
        call = Simulator(block_size=2).montecarlo.trajectories(CONFIG, 3)
        assert call.jobs == [(CONFIG, 0, 2), (CONFIG, 2, 3)]

    def test_worst_case(self):
        call = Simulator().montecarlo.worst_case_ensemble_mean(10, NoiseModel.phase(0.1), 50, master_seed=3)
        config = call.jobs[0][0]
        assert config.initial_state == InitialState.worst_case()
        assert config.master_seed == 3
        assert config.model == NoiseModel.phase(0.1)

    @pytest.mark.parametrize(
        "request_",
        [
            lambda mc: mc.ensemble_mean(CONFIG, 1),
            lambda mc: mc.ensemble_histogram(CONFIG, 5, 10),
            lambda mc: mc.ensemble_histogram(CONFIG, 5, 0),
            lambda mc: mc.ensemble_summary(CONFIG, 1, 1),
            lambda mc: mc.simulate_trajectory(CONFIG, -1),
            lambda mc: mc.trajectories(CONFIG, 0),
        ],
    )
    def test_domain(self, request_):
        with pytest.raises(DomainError):
            request_(Simulator().montecarlo)


class TestBangBangJobs:
    def test_ensemble_mean(self):
        call = Simulator(block_size=256).bangbang.ensemble_mean(BB_CONFIG, 300)
        assert call.fn is bangbang.controlled_final_fidelities
        assert call.jobs == [(BB_CONFIG, 0, 256), (BB_CONFIG, 256, 300)]

    def test_free_fidelity_trace(self):
        call = Simulator().bangbang.free_fidelity_trace(2.0, 0.1, 30)
        assert call.fn is bangbang.free_trace
        assert call.jobs == [(2.0, 0.1, 30, InitialState.sigma_y().theta, InitialState.sigma_y().phi)]

    @pytest.mark.parametrize(
        "request_",
        [
            lambda bb: bb.free_fidelity_trace(1.0, 0.1, 0),
            lambda bb: bb.free_fidelity_trace(1.0, 0.0, 10),
            lambda bb: bb.free_fidelity_trace(1.0, 0.1, 10, InitialState.uniform()),
            lambda bb: bb.bangbang_fidelity_trace(BB_CONFIG, -1),
            lambda bb: bb.trajectories(BB_CONFIG, 0),
            lambda bb: bb.ensemble_mean(BB_CONFIG, 1),
        ],
    )
    def test_domain(self, request_):
        with pytest.raises(DomainError):
            request_(Simulator().bangbang)
