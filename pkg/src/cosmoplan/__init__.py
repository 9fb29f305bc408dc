"""Cooperative multi-robot mission decomposition, planning and simulation.

The package is organised in three layers:

* ``automata`` / ``mission`` -- finite-automata algebra plus the
  assumption-learning verification loop that splits a global mission into
  per-robot missions.
* ``cltlb`` / ``scene`` / ``primspec`` / ``smtgate`` / ``planner`` -- the
  bounded-trace constraint pipeline that turns a per-robot mission into a
  sequence of motion primitives with poses.
* ``simulator`` -- a deterministic 2D executor for those plans with a
  passive-safety monitor.

``cli`` ties the layers together behind ``cosmoplan <subcommand>``.
"""

__version__ = "0.1.0"
