"""Published benchmark and price figures used as regression fixtures.

Two benchmark systems appear throughout: an ~81k-atom membrane protein
("MEM", 2 fs steps) and a ~2M-atom ribosome ("RIB", 4 fs steps). The
figures below are the raw columns (measured ns/day, meter readings, net
prices) from which every derived column (cost, yield, efficiency, ratio)
is recomputed by the tests.
"""

# ns/day per normalizer EUR of hardware cost
MEM_PRICE_NORMALIZER_EUR = 205
RIB_PRICE_NORMALIZER_EUR = 3600

# (label, ns/day, net hardware cost EUR) for the MEM benchmark
MEM_SINGLE_NODE = [
    ("i7-4770K", 7.364, 800),
    ("i7-4770K + 980oc", 26.081, 1250),
    ("i7-5820K", 10.081, 850),
    ("i7-5820K + 770", 26.532, 1170),
    ("i7-5820K + 980oc", 31.9955, 1390),
    ("E3-1270v2", 5.344, 1080),
    ("E3-1270v2 + 680", 19.9675, 1380),
    ("E3-1270v2 + 770", 20.530, 1400),
    ("E5-1620 + 680", 21.0375, 1900),
    ("E5-1620 + 770", 21.7, 1900),
    ("E5-1620 + 780", 21.8, 1970),
    ("E5-1620 + 780Ti", 23.4, 2100),
    ("E5-1620 + TITAN", 23.8, 2330),
    ("E5-1650 + 680", 22.6, 2170),
    ("E5-1650 + 770", 23.4, 2170),
    ("E5-1650 + 780", 25.0, 2240),
    ("E5-1650 + 780Ti", 27.0, 2370),
    ("E5-1650 + 2x680", 24.8, 2470),
    ("E5-1650 + 2x770", 25.1, 2470),
    ("E5-2670 + 770", 26.9, 2800),
    ("E5-2670 + 780", 28.34, 2870),
    ("E5-2670 + 780Ti", 29.6, 3000),
    ("E5-2670 + TITAN", 29.30, 3230),
    ("E5-2670 + 2x770", 27.6, 3120),
    ("E5-2670v2", 11.171, 2480),
    ("E5-2670v2 + 770", 28.9575, 2800),
    ("E5-2670v2 + 780", 29.8, 2870),
    ("E5-2670v2 + 780Ti", 31.4535, 3000),
    ("E5-2670v2 + TITAN", 32.7, 3230),
    ("E5-2670v2 + 980", 33.6125, 2900),
    ("E5-2670v2 + 2x770", 33.6835, 3120),
    ("E5-2670v2 + 2x780Ti", 35.7205, 3520),
    ("E5-2670v2 + 2x980", 36.762, 3330),
    ("2xE5-2670v2", 21.382, 3360),
    ("2xE5-2670v2 + 770", 35.9165, 3680),
    ("2xE5-2670v2 + 2x770", 51.6925, 4000),
    ("2xE5-2670v2 + 780Ti", 45.4965, 4100),
    ("2xE5-2670v2 + 2x780Ti", 56.9215, 4620),
    ("2xE5-2670v2 + 3x780Ti", 61.0805, 5140),
    ("2xE5-2670v2 + 4x780Ti", 64.436, 5660),
    ("2xE5-2680v2", 26.798, 4400),
    ("2xE5-2680v2 + 2xK20X", 55.226, 10000),
    ("2xE5-2680v2 + 2xK40", 55.88, 10600),
    ("2xE5-2680v2 + 980+", 52.0455, 4850),
    ("2xE5-2680v2 + 2x980+", 62.341, 5300),
    ("2xE5-2680v2 + 3x980+", 65.0975, 5750),
    ("2xE5-2680v2 + 4x980+", 66.9195, 6200),
    ("4xAMD-6272", 23.6865, 3670),
    ("2xAMD-6380", 16.031, 2880),
    ("2xAMD-6380 + TITAN", 32.5385, 3630),
    ("2xAMD-6380 + 2x770", 35.7535, 3520),
    ("2xAMD-6380 + 980+", 35.6225, 3330),
    ("2xAMD-6380 + 2x980+", 40.209, 3780),
]

# (label, ns/day, net hardware cost EUR) for the RIB benchmark
RIB_SINGLE_NODE = [
    ("i7-4770K", 0.510, 800),
    ("i7-4770K + 980oc", 1.3005, 1250),
    ("i7-5820K", 0.691, 850),
    ("i7-5820K + 770", 1.542, 1170),
    ("i7-5820K + 980oc", 1.799, 1390),
    ("E3-1270v2", 0.301, 1080),
    ("E3-1270v2 + 680", 0.886, 1380),
    ("E3-1270v2 + 770", 0.9065, 1400),
    ("E5-1620 + 680", 1.03, 1900),
    ("E5-1620 + 770", 1.02, 1900),
    ("E5-1620 + 780", 1.06, 1970),
    ("E5-1620 + 780Ti", 1.14, 2100),
    ("E5-1620 + TITAN", 1.11, 2330),
    ("E5-1650 + 680", 1.09, 2170),
    ("E5-1650 + 770", 1.13, 2170),
    ("E5-1650 + 780", 1.17, 2240),
    ("E5-1650 + 780Ti", 1.22, 2370),
    ("E5-1650 + 2x680", 1.40, 2470),
    ("E5-1650 + 2x770", 1.41, 2470),
    ("E5-2670 + 770", 1.39, 2800),
    ("E5-2670 + 780", 1.595, 2870),
    ("E5-2670 + 780Ti", 1.64, 3000),
    ("E5-2670 + TITAN", 1.6685, 3230),
    ("E5-2670 + 2x770", 1.72, 3120),
    ("E5-2670v2", 0.788, 2480),
    ("E5-2670v2 + 770", 1.7785, 2800),
    ("E5-2670v2 + 780", 1.60, 2870),
    ("E5-2670v2 + 780Ti", 2.0635, 3000),
    ("E5-2670v2 + TITAN", 1.75, 3230),
    ("E5-2670v2 + 980", 2.219, 2900),
    ("E5-2670v2 + 2x770", 2.1615, 3120),
    ("E5-2670v2 + 2x780Ti", 2.3135, 3520),
    ("E5-2670v2 + 2x980", 2.3365, 3330),
    ("2xE5-2670v2", 1.543, 3360),
    ("2xE5-2670v2 + 770", 2.7115, 3680),
    ("2xE5-2670v2 + 2x770", 3.411, 4000),
    ("2xE5-2670v2 + 780Ti", 3.3045, 4100),
    ("2xE5-2670v2 + 2x780Ti", 4.0215, 4620),
    ("2xE5-2670v2 + 3x780Ti", 4.174, 5140),
    ("2xE5-2670v2 + 4x780Ti", 4.1725, 5660),
    ("2xE5-2680v2", 1.858, 4400),
    ("2xE5-2680v2 + 2xK20X", 3.986, 10000),
    ("2xE5-2680v2 + 2xK40", 4.0899, 10600),
    ("2xE5-2680v2 + 980+", 3.991, 4850),
    ("2xE5-2680v2 + 2x980+", 4.688, 5300),
    ("2xE5-2680v2 + 3x980+", 4.8495, 5750),
    ("2xE5-2680v2 + 4x980+", 4.96, 6200),
    ("4xAMD-6272", 1.781, 3670),
    ("2xAMD-6380", 1.136, 2880),
    ("2xAMD-6380 + TITAN", 2.5785, 3630),
    ("2xAMD-6380 + 2x770", 2.7395, 3520),
    ("2xAMD-6380 + 980+", 2.812, 3330),
    ("2xAMD-6380 + 2x980+", 3.1415, 3780),
]

# Power/energy fixtures, RIB benchmark. The 2xE5-2670v2 chassis holds four
# GPU slots; a plug meter read kWh over 300 s intervals. Idle draw of one
# unused card: 27 W (780Ti), 24 W (980).
# (label, ns/day, meter kWh/300s, gpus active, idle W per card, node cost EUR)
CONSUMPTION_METER_RIB = [
    ("2xE5-2670v2", 1.38, 0.031, 0, 27, 3360),
    ("2xE5-2670v2 + 780Ti", 3.3045, 0.051, 1, 27, 3880),
    ("2xE5-2670v2 + 2x780Ti", 3.874, 0.064, 2, 27, 4400),
    ("2xE5-2670v2 + 3x780Ti", 4.174, 0.080, 3, 27, 5430),
    ("2xE5-2670v2 + 4x780Ti", 4.1725, 0.078, 4, 27, 5950),
    ("2xE5-2670v2 + 980", 3.678, 0.044, 1, 24, 3780),
    ("2xE5-2670v2 + 2x980", 4.182, 0.053, 2, 24, 4200),
    ("2xE5-2670v2 + 3x980", 4.204, 0.063, 3, 24, 5130),
    ("2xE5-2670v2 + 4x980", 4.1985, 0.067, 4, 24, 5550),
]

# Same chassis family read directly from the power supply (watts), RIB.
# (label, ns/day, direct watts, gpus active, idle W per card, node cost EUR)
CONSUMPTION_DIRECT_RIB = [
    ("2xE5-2680v2", 1.858, 542, 0, 24, 4400),
    ("2xE5-2680v2 + 980+", 3.991, 694, 1, 24, 4850),
    ("2xE5-2680v2 + 2x980+", 4.688, 847, 2, 24, 5300),
    ("2xE5-2680v2 + 3x980+", 4.8495, 950, 3, 24, 5750),
    ("2xE5-2680v2 + 4x980+", 4.96, 1092, 4, 24, 6200),
]
CONSUMPTION_GPUS_INSTALLED = 4

# Same direct-read nodes, MEM benchmark.
CONSUMPTION_DIRECT_MEM = [
    ("2xE5-2680v2", 26.798, 542, 0, 24, 4400),
    ("2xE5-2680v2 + 980+", 52.0455, 619, 1, 24, 4850),
    ("2xE5-2680v2 + 2x980+", 62.341, 773, 2, 24, 5300),
    ("2xE5-2680v2 + 3x980+", 65.0975, 848, 3, 24, 5750),
    ("2xE5-2680v2 + 4x980+", 66.9195, 899, 4, 24, 6200),
]

# Strong scaling series: (label, [(nodes, ns/day), ...]), single node first.
SCALING_MEM = [
    ("E3-1270v2 + 770 (QDR)", [(1, 20.530), (2, 27.218), (4, 22.077),
                               (8, 68.311), (16, 85.705), (32, 119.229)]),
    ("E5-1620 + 680 (QDR)", [(1, 21.0375), (2, 28.950), (4, 46.925)]),
    ("2xE5-2670v2 + 2x780Ti (QDR)", [(1, 56.9215), (2, 74.2125), (4, 103.379),
                                     (8, 119.1125), (16, 164.767), (32, 193.123)]),
    ("2xE5-2670v2 + 2x980 (QDR)", [(1, 58.035), (2, 75.5715), (4, 96.624)]),
    ("2xE5-2680v2 (FDR-14)", [(1, 26.798), (2, 42.000), (4, 76.348), (8, 122.379),
                              (16, 161.857), (32, 209.235), (64, 240.175)]),
    ("2xE5-2680v2 + 2xK20X (FDR-14)", [(1, 55.226), (2, 74.544), (4, 118.348),
                                       (8, 162.528), (16, 226.001), (32, 303.926)]),
]

SCALING_RIB = [
    ("E3-1270v2 + 770 (QDR)", [(1, 0.907), (2, 1.866), (4, 2.991), (8, 4.929),
                               (16, 4.741), (32, 10.251)]),
    ("2xE5-2670v2 + 2x780Ti (QDR)", [(1, 4.0215), (2, 6.225), (4, 10.7615),
                                     (8, 16.554), (16, 23.775), (32, 33.512)]),
    ("2xE5-2670v2 + 2x980 (QDR)", [(1, 4.182), (2, 6.6045), (4, 10.9565)]),
    ("2xE5-2680v2 (FDR-14)", [(1, 1.858), (2, 3.239), (4, 6.123), (8, 12.253),
                              (16, 21.776), (32, 39.425), (64, 70.743),
                              (128, 127.66), (256, 185.950), (512, 207.543)]),
    ("2xE5-2680v2 + 2xK20X (FDR-14)", [(1, 3.986), (2, 5.014), (4, 9.526),
                                       (8, 16.247), (16, 27.475), (32, 49.095),
                                       (64, 85.332), (128, 129.667), (256, 139.535)]),
]

# Replica-ensemble throughput on 2xE5-2680v2 + 2xK20X nodes (RIB): a single
# replica packed on m nodes versus 4 interleaved replicas on 4m nodes.
# (nodes per replica, single-replica ns/day, per-replica ns/day with 4 replicas)
MULTI_RIB = [
    (1, 3.986, 3.747),
    (2, 5.014, 6.563),
    (4, 9.526, 12.091),
    (8, 16.247, 20.774),
    (16, 27.475, 33.568),
    (32, 49.095, 55.480),
    (64, 85.332, 94.814),
]

# Toolchain comparison: hardware -> [(toolchain, MEM ns/day, RIB ns/day)].
COMPILERS = {
    "2xAMD-6380": [
        ("gcc-4.4.7", 14.043, 0.986),
        ("gcc-4.7.0", 15.609, 1.106),
        ("gcc-4.8.3", 16.025, 1.135),
        ("icc-13.1", 12.482, 0.959),
    ],
    "2xAMD-6380 + 2x980+": [
        ("gcc-4.4.7", 40.456, 3.044),
        ("gcc-4.7.0", 38.8845, 3.091),
        ("gcc-4.8.3", 40.209, 3.1415),
        ("icc-13.1", 39.651, 3.0885),
    ],
    "2xE5-2680v2": [
        ("gcc-4.4.7", 21.606, 1.628),
        ("gcc-4.8.3", 26.798, 1.858),
        ("icc-13.1", 24.570, 1.876),
        ("icc-14.0.2", 25.203, 1.811),
    ],
    "2xE5-2680v2 + 2x980+": [
        ("gcc-4.4.7", 61.2335, 4.4055),
        ("gcc-4.8.3", 62.341, 4.688),
        ("icc-13.1", 60.3, 4.7835),
    ],
}

# GPU boards: (model, CUDA cores, benchmark clock MHz, datasheet Gflop/s).
# The datasheet column assumes each vendor's reference clock, which is not
# always the benchmark clock; the recomputed figure can differ slightly.
GPU_BOARDS = [
    ("Tesla K20X", 2688, 732, 3950),
    ("Tesla K40", 2880, 745, 4290),
    ("GTX 680", 1536, 1058, 3090),
    ("GTX 770", 1536, 1110, 3213),
    ("GTX 780", 2304, 902, 3977),
    ("GTX 780Ti", 2880, 928, 5046),
    ("GTX TITAN", 2688, 928, 4500),
    ("GTX 980", 2048, 1126, 4612),
]

# Application-clock behaviour of the two HPC boards.
K20X_CLOCKS_MHZ = (614, 784)
K20X_DEFAULT_MHZ = 732
K40_CLOCKS_MHZ = (666, 875)
K40_DEFAULT_MHZ = 745
K40_SINGLE_GPU_GAIN_DEFAULT_TO_MAX = 0.064  # measured MEM/RIB fit
K20X_SINGLE_GPU_GAIN_DEFAULT_TO_MAX = 0.028
