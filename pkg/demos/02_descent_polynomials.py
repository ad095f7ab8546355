# coding: utf-8

# # The polynomials F_p, G_p, H_p
#
# H_p = G_p / (u + d4*v) is a form of degree p - 1. Its shift
# H_p(+-q^k - d4*v, v) controls which k are possible.

# In[1]:

from dioph.hpoly import (
    delta4,
    delta8,
    excluded_root_index,
    hp_form,
    hp_root_product_check,
    hp_shifted,
    hp_univariate,
)

# Coefficients of H_p(X, 1), constant term first.

# In[2]:

for p in (3, 5, 7):
    print(p, delta4(p), delta8(p), hp_univariate(p))

# # Shifted structure
#
# The v^(p-1) coefficient is H_p(-d4, 1) = d8 * 2^((p-1)/2) * p for either sign
# of the shift (the form has even degree). The constant is q^(k(p-1)) and the
# middle coefficients are divisible by p * q^k.

# In[3]:

for sign in (1, -1):
    sp = hp_shifted(7, 3, sign)
    print(sign, sp.leading, sp.constant, sp.middle)
print(delta8(7) * 2**3 * 7, hp_form(-delta4(7), 1, 7))

# # Roots
#
# H_p(X, 1) has the real roots tan((4j+3)pi/(4p)) except one index, which is a
# root of u + d4*v instead. The product of the remaining roots is checked
# against the constant term.

# In[4]:

for p in (5, 13, 61):
    print(p, excluded_root_index(p), hp_root_product_check(p))
