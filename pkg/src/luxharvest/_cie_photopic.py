"""CIE 1931 photopic luminous efficiency function V(lambda), 2 degree observer.

Tabulated at 5 nm from 360 nm to 830 nm; the loader in spectral.py expands
it to the 1 nm working grid by linear interpolation.  Peak value 1.0 at
555 nm by definition.
"""

PHOTOPIC_STEP_NM = 5.0
PHOTOPIC_START_NM = 360.0

# fmt: off
PHOTOPIC_5NM = (
    0.000003917,  # 360 nm
    0.000006965,
    0.00001239,
    0.00002202,
    0.000039,     # 380 nm
    0.000064,
    0.00012,
    0.000217,
    0.000396,     # 400 nm
    0.00064,
    0.00121,
    0.00218,
    0.004,        # 420 nm
    0.0073,
    0.0116,
    0.01684,
    0.023,        # 440 nm
    0.0298,
    0.038,
    0.048,
    0.06,         # 460 nm
    0.0739,
    0.09098,
    0.1126,
    0.13902,      # 480 nm
    0.1693,
    0.20802,
    0.2586,
    0.323,        # 500 nm
    0.4073,
    0.503,
    0.6082,
    0.71,         # 520 nm
    0.7932,
    0.862,
    0.91485,
    0.954,        # 540 nm
    0.9803,
    0.99495,
    1.0,          # 555 nm
    0.995,
    0.9786,
    0.952,
    0.9154,
    0.87,         # 580 nm
    0.8163,
    0.757,
    0.6949,
    0.631,        # 600 nm
    0.5668,
    0.503,
    0.4412,
    0.381,        # 620 nm
    0.321,
    0.265,
    0.217,
    0.175,        # 640 nm
    0.1382,
    0.107,
    0.0816,
    0.061,        # 660 nm
    0.04458,
    0.032,
    0.0232,
    0.017,        # 680 nm
    0.01192,
    0.00821,
    0.005723,
    0.004102,     # 700 nm
    0.002929,
    0.002091,
    0.001484,
    0.001047,     # 720 nm
    0.00074,
    0.00052,
    0.000361,
    0.000249,     # 740 nm
    0.000172,
    0.00012,
    0.0000848,
    0.00006,      # 760 nm
    0.0000424,
    0.00003,
    0.0000212,
    0.00001499,   # 780 nm
    0.0000106,
    0.0000074657,
    0.0000052578,
    0.0000037029, # 800 nm
    0.0000026078,
    0.0000018366,
    0.000001295,
    0.00000091092,  # 820 nm
    0.00000064153,
    0.00000045181,  # 830 nm
)
# fmt: on
