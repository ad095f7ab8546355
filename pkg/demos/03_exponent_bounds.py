# coding: utf-8

# # Exponent bounds from two logarithms
#
# A large p forces |i((u+iv)/(u-iv))^p - 1| to be tiny, while the lower bound
# for a linear form in two logarithms says it cannot be too tiny. All
# quantities are mpmath intervals, so every comparison is rigorous.

# In[1]:

import mpmath

from dioph import baker

# Constants of the lower bound at lambda = 1.8 and y = 126505.

# In[2]:

h = baker.alpha_height(126505)
c = baker.mignotte_constants(baker.MignotteParams(lam="1.8", h_alpha=h, b1=3803, b2=3803))
for name in ("rho", "K", "t", "T", "H"):
    x = getattr(c, name)
    print(name, mpmath.nstr(mpmath.mpf(x.a), 12), mpmath.nstr(mpmath.mpf(x.b), 12))

# # Bounds per case
#
# The bound B* is the largest prime for which the two sides do not clash. Above
# it, blocks of primes are certified at once, so the whole range up to 10^5
# takes milliseconds.

# In[3]:

for name in baker.CASES:
    b, cert = baker.p_bound_for_case(name)
    print(f"{name:6s} B* = {b:5d}  blocks = {len(cert.blocks):3d}  certificate ok: {baker.check_certificate(cert)}")

# Liouville's inequality handles the case l = 0 on its own.

# In[4]:

print(baker.liouville_p_max(126505))
