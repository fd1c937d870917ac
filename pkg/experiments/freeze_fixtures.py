'''Writes the table and figure sweeps to tests/fixtures/ for regression
testing.'''

import os
from jmfbm.scripts import table, figure

here = os.path.dirname(os.path.abspath(__file__))
fixtures = os.path.join(here, '..', 'tests', 'fixtures')
os.makedirs(fixtures, exist_ok=True)

# Table: T1 in years, K1 around the spot of 12
table.main(['--config', os.path.join(here, 'table1.conf'),
            '--t1-grid', '1.0,2.0,3.0',
            '--k1-grid', '10.0,11.0,12.0,13.0,14.0',
            '--out', os.path.join(fixtures, 'table1.csv')])

# Figure: coarse grid, refine for plotting
figure.main(['--config', os.path.join(here, 'figure1.conf'),
             '--t1-grid', '0.25,0.5,0.75',
             '--k1-grid', '0.8,1.0,1.2',
             '--out', os.path.join(fixtures, 'figure1.csv')])
