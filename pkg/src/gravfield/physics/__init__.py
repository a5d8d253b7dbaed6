from .types import (ABSENT_AFTER_TICKS, CANONICAL_SIGNALS, DT, GRAVITY,
                    MAX_AGENTS, AgentPose, ArenaBounds, MagnetParams,
                    ParamError, RopeParams, SignalFrame, SpringParams,
                    quat_identity, updated_params, vec)
from .rope import (DegenerateAnchorsError, RopeSignals, RopeState, attach_rope,
                   kinetic_energy, rope_signals, step_rope, zero_mid_velocity)
from .spring import SpringState, step_spring
from .magnet import MagneticState, field_at, init_magnetic, step_magnetic
from .world import MODE_CODES, OBJECT_NAMES, World, WorldConfig, mode_code
