"""Wang tiles to a single stick tile with edge-to-edge matching rules.

Layers: ``wang`` -> ``ab`` -> ``compiler`` (state tables and gap
assignments) -> ``schematic`` -> ``stick`` (hexagonal weave) -> ``geometry``.
"""

__version__ = "0.1.0"
