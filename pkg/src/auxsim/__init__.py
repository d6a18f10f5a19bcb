"""auxsim: quasi-static simulator for a folding-ring gripper-crawler."""

__version__ = "0.1.0"
