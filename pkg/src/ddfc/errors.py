"""Exception types shared across the package."""


class ContractViolation(ValueError):
    """An argument violates a documented precondition (shape/length mismatch)."""


class SimulationDivergence(RuntimeError):
    """A forward simulation produced a non-finite state."""

    def __init__(self, t, state, control, detail=""):
        self.t = t
        self.state = state
        self.control = control
        msg = f"non-finite state at t={t}: x={state!r}, u={control!r}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class BackwardDivergence(RuntimeError):
    """A backward sweep produced a non-finite adjoint value."""

    def __init__(self, step_index, detail=""):
        self.step_index = step_index
        msg = f"non-finite adjoint value at backward step {step_index}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class FiniteEscape(RuntimeError):
    """A matrix ODE solution blew up before reaching the initial time."""
