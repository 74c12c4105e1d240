"""Hidden hooks for negative-control testing.  Not part of the public API."""

# Added to the (0, 0) entry of every nodal derivative matrix when nonzero;
# used by the audit command's --corrupt-ddv flag to prove the gate trips.
ddv_corruption: float = 0.0
