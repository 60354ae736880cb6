"""
hyperdyn
Periodic non-autonomous dynamical systems on finite metric spaces and their
hyperspace lifts under the Hausdorff metric
"""

__version__ = "0.1.0"
