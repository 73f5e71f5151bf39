"""Drone base-station placement and FSO backhaul planning."""
__version__ = "0.1.0"
