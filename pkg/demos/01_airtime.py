"""Time-on-air for LoRa frames across spreading factors and payload sizes.

The headline number: a 40-byte frame at SF7/125 kHz with coding rate 4/5,
an 8-symbol preamble, explicit header and CRC takes exactly 82.176 ms on
air.  Everything else in the simulator (slot lengths, duty-cycle off-times,
ack windows) is built on top of this integer-microsecond arithmetic, so it
is worth seeing where it comes from.
"""

from lpwasim import RadioParams, airtime_us, payload_symbols

base = RadioParams()
print("Reference frame: 40 bytes, SF7, 125 kHz, CR 4/5, preamble 8, CRC on")
print(f"  payload symbols : {payload_symbols(40, base)}")
print(f"  symbol time     : {base.symbol_time_us:.0f} us")
print(f"  time on air     : {airtime_us(40, base)} us")
print()

print("Control frames used by the request/grant MAC (same radio settings):")
for name, size in (("request", 12), ("grant", 16), ("ack", 8)):
    t = airtime_us(size, base)
    print(f"  {name:8s} {size:3d} B -> {t:7d} us  "
          f"(1% duty off-time {99 * t / 1e6:7.3f} s)")
print()

print("Airtime (ms) by spreading factor and payload:")
payloads = [0, 8, 16, 40, 64, 128, 222]
header = "  SF | " + " | ".join(f"{p:>7d} B" for p in payloads)
print(header)
print("  " + "-" * (len(header) - 2))
for sf in range(7, 13):
    params = RadioParams(spreading_factor=sf)
    row = " | ".join(f"{airtime_us(p, params) / 1000:9.1f}" for p in payloads)
    ldro = " (low-data-rate opt.)" if params.ldro_active else ""
    print(f"  {sf:2d} | {row}{ldro}")
print()
print("Doubling SF roughly doubles airtime; at SF11+ the symbol time crosses")
print("16 ms and low-data-rate optimization kicks in automatically.")
