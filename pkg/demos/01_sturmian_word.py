"""The golden-mean Sturmian potential and its rotation number.

Builds V(n) = chi_[1-theta, 1)(n theta mod 1) for theta = (sqrt 5 - 1)/2,
compares it with the Fibonacci substitution word, and prints the first
partial quotients of theta together with their running means.
"""
from spectral_lab.numbertheory import bounded_density_statistic, continued_fraction, convergents
from spectral_lab.potentials import Sturmian

pot = Sturmian(1.0, "golden", 0)
v = pot.array(1, 35)
print("V(1..34) =", "".join(str(int(x)) for x in v))

word = "a"
while len(word) < 34:
    word = "".join("ab" if c == "a" else "a" for c in word)
print("a->ab    =", word[:34].replace("a", "1").replace("b", "0"))

# far from the origin the indicator is still decided exactly
print("V(10**12 .. 10**12+20) =", "".join(str(int(x)) for x in pot.array(10**12, 10**12 + 21)))

cf = continued_fraction("golden", 12)
print("partial quotients:", cf.coefficients)
print("running means:    ", bounded_density_statistic(cf))
print("convergents:      ", convergents(cf)[:8])

silver = continued_fraction("silver", 8)
print("sqrt(2)-1 quotients:", silver.coefficients)
