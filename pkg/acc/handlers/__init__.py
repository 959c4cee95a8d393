# acc/handlers/__init__.py
from ..config import Settings
from .hb import register_hb_handlers
from .orbit import register_orbit_handlers
from .simulate import register_simulate_handlers
from .stability import register_stability_handlers
from .sweep_pole import register_sweep_handlers
from .tf import register_tf_handlers


def register_all_handlers(subparsers, settings: Settings) -> None:
    register_simulate_handlers(subparsers, settings)
    register_orbit_handlers(subparsers, settings)
    register_stability_handlers(subparsers, settings)
    register_sweep_handlers(subparsers, settings)
    register_hb_handlers(subparsers, settings)
    register_tf_handlers(subparsers, settings)
