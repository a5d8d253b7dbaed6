"""gravfield: headless orchestration engine for body-anchored digital
physics objects (rope, spring, magnetic field) with OSC sound control,
live reconfiguration, snapshot streaming, and deterministic replay."""

__version__ = "0.1.0"
