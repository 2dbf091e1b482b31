"""comhom: комбінаторно-гомоморфний конвеєр розпізнавання жестів поверхневої ЕМГ."""

__version__ = "0.1.0"
