import numpy as np
import pytest

from dicke_rap import SpinSystem, dicke_protocol, dicke_state, propagate


@pytest.fixture(scope="session", autouse=True)
def warm_integrator_kernel():
    """Trigger the JIT compilation once so timed tests measure physics."""
    system = SpinSystem(2)
    sched = dicke_protocol(system, 1.0, 0.5, 0)
    propagate(system, sched, dicke_state(system, 1),
              np.array([sched.t_end]))
