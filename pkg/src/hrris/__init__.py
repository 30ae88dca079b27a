"""Secrecy-capacity simulation and optimization for hybrid relay-reflecting
intelligent surfaces (HR-RIS) assisting a mmWave MIMO link observed by a
multi-antenna eavesdropper.

Subpackages and modules:
    numerics    dense complex linear-algebra kernels
    channel     geometric mmWave channel synthesis and CSI error models
    system      surface coefficients, effective channels, secrecy capacity
    beamformer  closed-form transmit beamformer
    swarm       particle-swarm optimizer for the surface coefficients
    ao          alternating optimization driver and Monte Carlo engine
    config      experiment configuration parsing and defaults
    plots       dependency-free SVG line charts
    experiments predefined sweeps, CSV/plot emission
    service     FastAPI wrapper around the core
    cli         command-line entry point
"""

__version__ = "0.1.0"
