# Copyright 2026 The duelopt Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# =============================================================================
"""Reference raw values for the benchmark registry (minimization form).

Independent transcription of the standard test-function definitions.
Prints C++ initializer rows consumed by tests/test_benchmarks.cpp.
"""
import math

import numpy as np

PI = math.pi


def ackley(x):
    x = np.asarray(x)
    d = len(x)
    return (-20 * math.exp(-0.2 * math.sqrt(np.sum(x**2) / d))
            - math.exp(np.sum(np.cos(2 * PI * x)) / d) + 20 + math.e)


def beale(x):
    a, b = x
    return (1.5 - a + a * b)**2 + (2.25 - a + a * b**2)**2 + (2.625 - a + a * b**3)**2


def bohachevsky(x):
    a, b = x
    return a**2 + 2 * b**2 - 0.3 * math.cos(3 * PI * a) - 0.4 * math.cos(4 * PI * b) + 0.7


def three_hump(x):
    a, b = x
    return 2 * a**2 - 1.05 * a**4 + a**6 / 6 + a * b + b**2


def six_hump(x):
    a, b = x
    return (4 - 2.1 * a**2 + a**4 / 3) * a**2 + a * b + (-4 + 4 * b**2) * b**2


def colville(x):
    x1, x2, x3, x4 = x
    return (100 * (x1**2 - x2)**2 + (x1 - 1)**2 + (x3 - 1)**2 + 90 * (x3**2 - x4)**2
            + 10.1 * ((x2 - 1)**2 + (x4 - 1)**2) + 19.8 * (x2 - 1) * (x4 - 1))


def cross_in_tray(x):
    a, b = x
    f = abs(math.sin(a) * math.sin(b) * math.exp(abs(100 - math.sqrt(a * a + b * b) / PI))) + 1
    return -0.0001 * f**0.1


def dixon_price(x):
    return (x[0] - 1)**2 + sum(i * (2 * x[i - 1]**2 - x[i - 2])**2 for i in range(2, len(x) + 1))


def drop_wave(x):
    r2 = x[0]**2 + x[1]**2
    return -(1 + math.cos(12 * math.sqrt(r2))) / (0.5 * r2 + 2)


def eggholder(x):
    a, b = x
    return (-(b + 47) * math.sin(math.sqrt(abs(b + a / 2 + 47)))
            - a * math.sin(math.sqrt(abs(a - (b + 47)))))


def forrester(x):
    return (6 * x[0] - 2)**2 * math.sin(12 * x[0] - 4)


def goldstein_price(x):
    a, b = x
    f1 = 1 + (a + b + 1)**2 * (19 - 14 * a + 3 * a**2 - 14 * b + 6 * a * b + 3 * b**2)
    f2 = 30 + (2 * a - 3 * b)**2 * (18 - 32 * a + 12 * a**2 + 48 * b - 36 * a * b + 27 * b**2)
    return f1 * f2


def griewank(x):
    s = sum(v**2 / 4000 for v in x)
    p = np.prod([math.cos(v / math.sqrt(i + 1)) for i, v in enumerate(x)])
    return s - p + 1


def gramacy_lee(x):
    return math.sin(10 * PI * x[0]) / (2 * x[0]) + (x[0] - 1)**4


ALPHA = [1.0, 1.2, 3.0, 3.2]
A3 = [[3.0, 10, 30], [0.1, 10, 35], [3.0, 10, 30], [0.1, 10, 35]]
P3 = 1e-4 * np.array([[3689, 1170, 2673], [4699, 4387, 7470], [1091, 8732, 5547],
                      [381, 5743, 8828]])
A6 = [[10, 3, 17, 3.50, 1.7, 8], [0.05, 10, 17, 0.1, 8, 14], [3, 3.5, 1.7, 10, 17, 8],
      [17, 8, 0.05, 10, 0.1, 14]]
P6 = 1e-4 * np.array([[1312, 1696, 5569, 124, 8283, 5886], [2329, 4135, 8307, 3736, 1004, 9991],
                      [2348, 1451, 3522, 2883, 3047, 6650], [4047, 8828, 8732, 5743, 1091, 381]])


def hartmann3(x):
    return -sum(ALPHA[i] * math.exp(-sum(A3[i][j] * (x[j] - P3[i][j])**2 for j in range(3)))
                for i in range(4))


def hartmann4(x):
    s = sum(ALPHA[i] * math.exp(-sum(A6[i][j] * (x[j] - P6[i][j])**2 for j in range(4)))
            for i in range(4))
    return (1.1 - s) / 0.839


def hartmann6(x):
    return -sum(ALPHA[i] * math.exp(-sum(A6[i][j] * (x[j] - P6[i][j])**2 for j in range(6)))
                for i in range(4))


def holder(x):
    a, b = x
    return -abs(math.sin(a) * math.cos(b) * math.exp(abs(1 - math.sqrt(a * a + b * b) / PI)))


def langermann(x):
    c = [1, 2, 5, 2, 3]
    A = [[3, 5], [5, 2], [2, 1], [1, 4], [7, 9]]
    s = 0.0
    for i in range(5):
        r = sum((x[j] - A[i][j])**2 for j in range(2))
        s += c[i] * math.exp(-r / PI) * math.cos(PI * r)
    return s


def levy(x):
    w = [1 + (v - 1) / 4 for v in x]
    s = math.sin(PI * w[0])**2
    for wi in w[:-1]:
        s += (wi - 1)**2 * (1 + 10 * math.sin(PI * wi + 1)**2)
    s += (w[-1] - 1)**2 * (1 + math.sin(2 * PI * w[-1])**2)
    return s


def levy13(x):
    a, b = x
    return (math.sin(3 * PI * a)**2 + (a - 1)**2 * (1 + math.sin(3 * PI * b)**2)
            + (b - 1)**2 * (1 + math.sin(2 * PI * b)**2))


def perm0(x, beta=10.0):
    d = len(x)
    return sum(sum((j + beta) * (x[j - 1]**i - 1 / j**i) for j in range(1, d + 1))**2
               for i in range(1, d + 1))


def perm(x, beta=0.5):
    d = len(x)
    return sum(sum((j**i + beta) * ((x[j - 1] / j)**i - 1) for j in range(1, d + 1))**2
               for i in range(1, d + 1))


def powell(x):
    s = 0.0
    for k in range(len(x) // 4):
        a, b, c, d = x[4 * k:4 * k + 4]
        s += (a + 10 * b)**2 + 5 * (c - d)**2 + (b - 2 * c)**4 + 10 * (a - d)**4
    return s


def rosenbrock(x):
    return sum(100 * (x[i + 1] - x[i]**2)**2 + (x[i] - 1)**2 for i in range(len(x) - 1))


def rotated_hyper_ellipsoid(x):
    return sum(sum(x[j]**2 for j in range(i + 1)) for i in range(len(x)))


def schaffer4(x):
    a, b = x
    return 0.5 + (math.cos(math.sin(abs(a * a - b * b)))**2 - 0.5) / (1 + 0.001 * (a * a + b * b))**2


def schwefel(x):
    return 418.9829 * len(x) - sum(v * math.sin(math.sqrt(abs(v))) for v in x)


def shekel(x):
    beta = 0.1 * np.array([1, 2, 2, 4, 4, 6, 3, 7, 5, 5])
    C = np.array([[4.0, 1, 8, 6, 3, 2, 5, 8, 6, 7], [4.0, 1, 8, 6, 7, 9, 3, 1, 2, 3.6],
                  [4.0, 1, 8, 6, 3, 2, 5, 8, 6, 7], [4.0, 1, 8, 6, 7, 9, 3, 1, 2, 3.6]])
    return -sum(1 / (sum((x[j] - C[j, i])**2 for j in range(4)) + beta[i]) for i in range(10))


def shubert(x):
    return np.prod([sum(i * math.cos((i + 1) * v + i) for i in range(1, 6)) for v in x])


def sphere(x):
    return sum(v**2 for v in x)


def sum_squares(x):
    return sum((i + 1) * v**2 for i, v in enumerate(x))


def trid(x):
    return sum((v - 1)**2 for v in x) - sum(x[i] * x[i - 1] for i in range(1, len(x)))


def ursem_waves(x):
    a, b = x
    return (-0.9 * a**2 + (b**2 - 4.5 * b**2) * a * b
            + 4.7 * math.cos(3 * a - b**2 * (2 + a)) * math.sin(2.5 * PI * a))


# name, function, three in-box points (first is the known minimizer where one exists)
CASES = [
    ("ackley", ackley, [[0, 0], [1.5, -2.25], [20.0, 7.5]]),
    ("beale", beale, [[3, 0.5], [0, 0], [-1.2, 2.7]]),
    ("bohachevsky", bohachevsky, [[0, 0], [1.1, -0.4], [-50, 75]]),
    ("three-hump-camel", three_hump, [[0, 0], [1.0, 1.0], [-2.5, 3.3]]),
    ("six-hump-camel", six_hump, [[0.0898, -0.7126], [1.0, 1.0], [-2.5, 1.5]]),
    ("colville", colville, [[1, 1, 1, 1], [0, 0, 0, 0], [-2.0, 3.0, 0.5, -1.5]]),
    ("cross-in-tray", cross_in_tray, [[1.3491, 1.3491], [0, 0], [-7.5, 2.25]]),
    ("dixon-price", dixon_price, [[1, 2**-0.5], [0, 0], [-3.0, 4.5]]),
    ("drop-wave", drop_wave, [[0, 0], [0.5, -0.25], [-4.0, 3.0]]),
    ("eggholder", eggholder, [[512, 404.2319], [0, 0], [-300.0, 150.0]]),
    ("forrester", forrester, [[0.0], [0.757249], [0.3]]),
    ("goldstein-price", goldstein_price, [[0, -1], [0, 0], [1.5, -0.5]]),
    ("griewank", griewank, [[0, 0], [100.0, -50.0], [3.0, 4.0]]),
    ("gramacy-lee", gramacy_lee, [[0.548563444114526], [1.0], [2.2]]),
    ("hartmann3", hartmann3, [[0.114614, 0.555649, 0.852547], [0.5, 0.5, 0.5], [0.1, 0.9, 0.3]]),
    ("hartmann4", hartmann4, [[0.1873, 0.1906, 0.5566, 0.2647], [0.5] * 4, [0.9, 0.1, 0.4, 0.7]]),
    ("hartmann6", hartmann6, [[0.20169, 0.150011, 0.476874, 0.275332, 0.311652, 0.6573],
                              [0.5] * 6, [0.1, 0.2, 0.3, 0.4, 0.5, 0.6]]),
    ("holder", holder, [[8.05502, 9.66459], [0, 0], [-3.0, 5.0]]),
    ("langermann", langermann, [[2.00299219, 1.006096], [5.0, 5.0], [9.0, 0.5]]),
    ("levy", levy, [[1, 1], [0, 0], [-7.5, 3.2]]),
    ("levy13", levy13, [[1, 1], [0, 0], [-4.0, 6.5]]),
    ("perm0", perm0, [[1, 0.5], [0, 0], [-1.5, 1.8]]),
    ("perm", perm, [[1, 2], [0, 0], [-1.5, 1.8]]),
    ("powell", powell, [[0, 0, 0, 0], [1, 1, 1, 1], [-3.0, 2.0, 4.5, -1.0]]),
    ("rosenbrock", rosenbrock, [[1, 1], [0, 0], [-1.5, 2.0]]),
    ("rotated-hyper-ellipsoid", rotated_hyper_ellipsoid, [[0, 0], [1, 2], [-30.0, 45.5]]),
    ("schaffer4", schaffer4, [[0, 1.253115], [0, 0], [-40.0, 25.0]]),
    ("schwefel", schwefel, [[420.9687, 420.9687], [0, 0], [-200.0, 350.0]]),
    ("shekel", shekel, [[4, 4, 4, 4], [0, 0, 0, 0], [8.0, 1.0, 3.0, 6.0]]),
    ("shubert", shubert, [[5.4828, 4.8580], [0, 0], [9.0, 2.5]]),
    ("sphere", sphere, [[0, 0], [1.5, -2.0], [5.0, 5.12]]),
    ("sum-squares", sum_squares, [[0, 0], [1, 1], [-7.0, 9.5]]),
    ("trid", trid, [[2, 2], [0, 0], [-3.0, 3.5]]),
    ("ursem-waves", ursem_waves, [[1.2, 1.2], [0, 0], [-0.6, -0.8]]),
]

if __name__ == "__main__":
    for name, f, pts in CASES:
        for p in pts:
            xs = ", ".join(repr(float(v)) for v in p)
            print(f'    {{"{name}", {{{xs}}}, {float(f(p))!r}}},')
