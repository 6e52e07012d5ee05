"""
Zustandssumme - Schätzung diskreter Integrale über gehashte Optimierung.

Ein Python-Paket zur Berechnung von Zustandssummen (Partitionsfunktionen)
von Faktorgraphen mit konstantem Approximationsfaktor. Das Zählproblem wird
auf MAP-Instanzen mit zufälligen XOR-Nebenbedingungen reduziert (WISH),
die ein eingebauter Branch-and-Bound-Löser bearbeitet.
"""
__version__ = "0.3.0"

__all__ = ["__version__"]
