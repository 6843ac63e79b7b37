"""Frozen oracle values; regenerate with ``python3 tests/oracles/derive.py``.

Mean curvatures are ``-trace(A)/m`` toward the future unit normal for the
graphs ``u = c + 0.3 sin(phi)`` (``c = 1`` on CFG-B, else 0) at
``phi = 2 pi k / 16``, and ``u = 0.2 sin(phi) sin(psi)`` on CFG-D at
``(2 pi a / 16, 2 pi b / 16)``.  ``PARAB_*`` are partial integrals from 1 to R.
"""

SINE_H_CFG_A = {
    1: -0.12942888115282697,
    3: -0.28273515726566045,
    6: -0.2273009231285094,
    11: 0.28273515726566045,
}

SINE_H_CFG_B = {
    1: 0.9832862270401689,
    3: 0.9779053507075899,
    6: 0.9790941352261243,
    11: 1.0640382525225778,
}

SINE_H_CFG_C = {
    1: -1.2299474184678547,
    3: -0.12283061613468023,
    6: 0.7651185273357765,
    11: 1.0602174137202052,
}

PRODUCT_H_CFG_D = {
    (1, 2): -0.2216976697015253,
    (5, 12): 0.23168728223516055,
    (8, 3): 0.0,
}

PARAB_EXP = {
    10: 0.007782757983252361,
    20: 0.007782757998906086,
    40: 0.007782757998906086,
}

PARAB_POWER = {
    10: 0.12438587593895986,
    20: 0.13232052793352883,
    40: 0.13629650385697006,
}
