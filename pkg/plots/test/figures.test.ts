import * as fs from 'node:fs';
import * as path from 'node:path';
import { describe, expect, it } from 'vitest';

import { EmptyInput, SchemaMismatch } from '../src/csv.js';
import {
  renderFigure,
  renderImprovement,
  renderLadder,
  renderPerQuery,
  renderSweep,
  renderTopK,
} from '../src/figures.js';

const FIXTURES = path.join(__dirname, '..', 'fixtures');

function fixture(name: string): string {
  return fs.readFileSync(path.join(FIXTURES, name), 'utf-8');
}

/** Independent sum: naive split-based accumulation over a CSV column. */
function columnSum(text: string, column: string, filter?: (row: string[]) => boolean): number {
  const lines = text.trim().split('\n');
  const header = lines[0].split(',');
  const idx = header.indexOf(column);
  let total = 0;
  for (const line of lines.slice(1)) {
    const fields = line.split(',');
    if (filter && !filter(fields)) continue;
    total += Number(fields[idx]);
  }
  return total;
}

function embeddedTotals(svg: string): Record<string, number> {
  const match = svg.match(/<metadata id="figure-totals">(.*?)<\/metadata>/s);
  expect(match).not.toBeNull();
  const decoded = match![1].replace(/&amp;/g, '&').replace(/&lt;/g, '<').replace(/&gt;/g, '>');
  return JSON.parse(decoded);
}

describe('sweep figure', () => {
  it('renders stacked bars and reports exact CSV sums', () => {
    const text = fixture('sweep.csv');
    const { svg, totals } = renderSweep(text);
    expect(svg).toContain('<svg');
    expect((svg.match(/<rect/g) ?? []).length).toBeGreaterThanOrEqual(2 * 7);
    expect(totals.planning_us).toBe(columnSum(text, 'planning_us'));
    expect(totals.execution_us).toBe(columnSum(text, 'execution_us'));
    expect(embeddedTotals(svg)).toEqual(totals);
  });
});

describe('ladder figure', () => {
  it('renders one stack per oracle depth with exact sums', () => {
    const text = fixture('ladder.csv');
    const { svg, totals } = renderLadder(text);
    expect(svg).toContain('perfect-(max)');
    expect(totals.execution_us).toBe(columnSum(text, 'execution_us'));
    expect(totals.planning_us).toBe(columnSum(text, 'planning_us'));
    expect(embeddedTotals(svg)).toEqual(totals);
  });
});

describe('per-query figure', () => {
  it('orders queries ascending by the baseline execution time', () => {
    const text = fixture('bench.csv');
    const { svg, totals } = renderPerQuery(text, 'default');
    const order = ['q32_star_hub_point', 'q11_chain_hot3', 'q01_stocks_top', 'q25_star_snow5'];
    const positions = order.map((q) => svg.indexOf(`>${q}<`));
    expect(positions.every((p) => p >= 0)).toBe(true);
    expect([...positions].sort((a, b) => a - b)).toEqual(positions);
    for (const config of ['default', 'perfect', 'reopt']) {
      expect(totals[config]).toBe(
        columnSum(text, 'execution_us', (f) => f[1] === config),
      );
    }
    expect(embeddedTotals(svg)).toEqual(totals);
  });

  it('rejects a missing baseline config', () => {
    expect(() => renderPerQuery(fixture('bench.csv'), 'nope')).toThrow(SchemaMismatch);
  });
});

describe('top-k figure', () => {
  it('keeps file order and sums planning plus execution', () => {
    const text = fixture('topk.csv');
    const { svg, totals } = renderTopK(text);
    expect(svg.indexOf('>q25_star_snow5<')).toBeLessThan(svg.indexOf('>q01_stocks_top<'));
    for (const config of ['default', 'perfect', 'reopt']) {
      const expected =
        columnSum(text, 'execution_us', (f) => f[1] === config) +
        columnSum(text, 'planning_us', (f) => f[1] === config);
      expect(totals[config]).toBe(expected);
    }
    expect(embeddedTotals(svg)).toEqual(totals);
  });
});

describe('improvement figure', () => {
  it('draws one polyline per query plus dashed baselines', () => {
    const text = fixture('improvement.csv');
    const { svg, totals } = renderImprovement(text);
    expect((svg.match(/<polyline/g) ?? []).length).toBe(2);
    expect((svg.match(/stroke-dasharray/g) ?? []).length).toBeGreaterThanOrEqual(2);
    expect(totals.q25_star_snow5).toBe(
      columnSum(text, 'execution_us', (f) => f[0] === 'q25_star_snow5'),
    );
    expect(embeddedTotals(svg)).toEqual(totals);
  });
});

describe('error handling', () => {
  it('raises EmptyInput on empty or header-only files', () => {
    expect(() => renderSweep('')).toThrow(EmptyInput);
    expect(() => renderSweep('threshold,planning_us,execution_us,reopt_rounds\n')).toThrow(EmptyInput);
  });

  it('raises SchemaMismatch on wrong headers', () => {
    expect(() => renderLadder(fixture('sweep.csv'))).toThrow(SchemaMismatch);
    expect(() => renderSweep('a,b\n1,2\n')).toThrow(SchemaMismatch);
  });
});

describe('determinism', () => {
  it('same input renders byte-identical output for every kind', () => {
    const inputs: Array<[Parameters<typeof renderFigure>[0], string]> = [
      ['sweep', 'sweep.csv'],
      ['ladder', 'ladder.csv'],
      ['per_query', 'bench.csv'],
      ['top_k', 'topk.csv'],
      ['improvement', 'improvement.csv'],
    ];
    for (const [kind, file] of inputs) {
      const text = fixture(file);
      expect(renderFigure(kind, text).svg).toBe(renderFigure(kind, text).svg);
    }
  });
});
