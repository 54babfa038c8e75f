"""trialsieve: rule-driven clinical trial eligibility extraction engine."""

__version__ = "0.1.0"
