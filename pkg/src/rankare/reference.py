"""Reference values for the W-versus-vdW tables.

Each row maps the family parameter to ``(C_f, D_f, ARE, serial ARE)``
exactly as printed, to six significant digits.  ``None`` marks a cell
printed as a dash because the moment integrals diverge.
"""

# a -> 0 limit of the piecewise Gaussian family, keyed by eps
TABLE1 = {
    0.0: (0.398942, 0.282070, 1.90986, 1.82346),
    0.2: (0.396313, 0.276619, 1.88476, 1.73062),
    0.4: (0.388772, 0.271848, 1.81372, 1.60844),
    0.6: (0.377291, 0.271061, 1.70818, 1.50608),
    1.0: (0.348213, 0.287973, 1.45503, 1.44796),
    2.0: (0.294160, 0.303085, 1.03836, 1.14461),
    3.0: (0.282852, 0.285646, 0.960064, 0.940023),
    10.0: (0.282095, 0.282095, 0.954930, 0.911891),
    100.0: (0.282095, 0.282095, 0.954930, 0.911891),
}

# Student t, keyed by degrees of freedom
TABLE2 = {
    0.1: (0.394451, None, 1.86710, None),
    1.0: (0.343120, None, 1.41277, None),
    2.0: (0.321212, 0.243196, 1.23813, 0.878736),
    4.0: (0.304695, 0.269173, 1.11407, 0.968623),
    6.0: (0.297953, 0.274541, 1.06531, 0.963551),
    8.0: (0.294303, 0.276784, 1.03937, 0.955507),
    10.0: (0.292017, 0.278005, 1.02329, 0.949042),
    100.0: (0.283146, 0.281737, 0.962059, 0.916370),
}

# power-exponential, keyed by alpha
TABLE3 = {
    0.1: (0.393903, 0.175222, 1.86191, 0.685991),
    1.0: (0.313329, 0.2720600, 1.1781, 1.046388),
    2.0: (0.282095, 0.2820950, 0.954930, 0.911893),
    10.0: (0.222095, 0.2934363, 0.591916, 0.611600),
    100.0: (0.168549, 0.2953577, 0.340904, 0.356871),
}

TABLES = {1: TABLE1, 2: TABLE2, 3: TABLE3}
DEFAULT_TOL = {1: 1e-3, 2: 1e-4, 3: 1e-4}
COLUMNS = ("C_f", "D_f", "ARE", "ARE_serial")

# landmark points of the parameter scans
STUDENT_ARE_ONE = 15.42
POWEREXP_ARE_ONE = 1.7206
STUDENT_SERIAL_MAX = (4.24, 0.968852)
POWEREXP_SERIAL_MAX = (0.510, 1.08552)
STUDENT_SERIAL_INF = 0.878736
