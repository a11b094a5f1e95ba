"""
Butcher tableaux for the two stepping schemes.
"""

# Dormand-Prince 5(4): nodes, stage weights, fifth-order and embedded
# fourth-order solution weights. The last stage is evaluated at the accepted
# fifth-order solution, so its slope is reused as the next first stage.
DP_C = (0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0)

DP_A = (
    (),
    (1.0 / 5.0,),
    (3.0 / 40.0, 9.0 / 40.0),
    (44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0),
    (19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0),
    (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0),
    (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0),
)

DP_B = (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0)

DP_B_EMBEDDED = (
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
)

DP_E = tuple(b - bs for b, bs in zip(DP_B, DP_B_EMBEDDED))

DP_ORDER = 5

# PI controller exponents (as fractions of 1/order).
PI_ALPHA = 0.7 / DP_ORDER
PI_BETA = 0.4 / DP_ORDER
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0

# Classical fourth-order Runge-Kutta.
RK4_C = (0.0, 0.5, 0.5, 1.0)
RK4_B = (1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0)
