"""Regression pins for the closed-form calculators.

Generated by scripts/compute_pins.py with 50-digit arithmetic; do not edit.
Each entry: (formula, arguments, sign, natural log of |value|).
"""

PINS = [
    ('measurement_class', ('-', 3, 2, 2), 1, '6.93147180559945309417232121458'),
    ('low_complexity', ('SU', 10, 1, 0.5, 2), 1, '-4.49744137992234043351403884308'),
    ('low_complexity', ('SO', 10, 1, 0.5, 2), 1, '3.56505862007765956648596115692'),
    ('low_complexity', ('Sp', 10, 1, 0.5, 2), 1, '-4.37244137992234043351403884308'),
    ('low_complexity', ('SU', 20, 50, 0.25, 16), 1, '-36557.80145402952099148434457'),
    ('design_low_complexity', ('SU', 8, 2, 0.1, 2, 6, 0.0), 1, '11.3259209602718918597533021623'),
    ('design_low_complexity', ('SO', 8, 2, 0.1, 2, 6, 0.0), 1, '12.7279016763138342643341344902'),
    ('design_low_complexity', ('Sp', 12, 3, 0.2, 4, 30, 0.001), 1, '6.97397391328888353052372444007'),
    ('packing', ('SO', 1024, 0.5), 1, '0.160580638880109381165535757084'),
    ('packing', ('Sp', 1024, 0.5), 1, '5.61370563888010938116553575708'),
    ('packing', ('SU', 4096, 0.3), 1, '0.437305638880109381165535757084'),
    ('design_packing', ('SU', 256, 0.5, 8, 0.0), 1, '1.81565095189621103660013657304'),
    ('design_packing', ('SO', 256, 0.5, 8, 0.0001), 1, '-1.16936007015631899762258171076'),
    ('design_packing', ('Sp', 1024, 0.4, 12, 0.000244140625), 1, '-6.06691828510484314606591822615'),
    ('sq', ('SU', 10, 0.1, 0.1, 0.5), -1, '-0.633183118359492880419769550097'),
    ('sq', ('SO', 14, 0.1, 0.1, 0.9), 1, '4.30748987007597804166084227142'),
    ('sq', ('Sp', 14, 0.1, 0.1, 0.9), 1, '9.44266303789306274452344566314'),
]
