/** The five figure renderers. Each consumes a harness CSV verbatim (no
 * recomputation beyond summing what it draws), returns the SVG text plus
 * the totals it rendered, and embeds those totals in the SVG metadata so
 * files are self-describing. */

import {
  BENCH_HEADER,
  IMPROVEMENT_HEADER,
  LADDER_HEADER,
  SWEEP_HEADER,
  SchemaMismatch,
  num,
  parseCsv,
  Row,
} from './csv.js';
import { MARGIN, PALETTE, SvgCanvas, drawAxis } from './svg.js';

export interface Figure {
  svg: string;
  totals: Record<string, number>;
}

export type FigureKind = 'sweep' | 'ladder' | 'per_query' | 'top_k' | 'improvement';

interface StackedBar {
  label: string;
  planning: number;
  execution: number;
}

/** Stacked planning+execution bars; shared by the sweep and ladder figures. */
function stackedBars(bars: StackedBar[], title: string, xLabel: string): Figure {
  const width = Math.max(420, MARGIN.left + MARGIN.right + bars.length * 64);
  const plotWidth = width - MARGIN.left - MARGIN.right;
  const plotHeight = 300;
  const svg = new SvgCanvas(width, plotHeight + MARGIN.top + MARGIN.bottom);
  const peak = Math.max(...bars.map((b) => b.planning + b.execution));
  const scale = drawAxis(svg, peak, plotWidth, plotHeight, 'time (ms)');
  const slot = plotWidth / bars.length;
  const barWidth = slot * 0.6;
  bars.forEach((bar, i) => {
    const x = MARGIN.left + slot * i + (slot - barWidth) / 2;
    const yExec = scale(bar.execution);
    const yTop = scale(bar.execution + bar.planning);
    svg.rect(x, yExec, barWidth, scale(0) - yExec, PALETTE[0], `execution ${bar.execution} us`);
    svg.rect(x, yTop, barWidth, yExec - yTop, PALETTE[1], `planning ${bar.planning} us`);
    svg.text(x + barWidth / 2, scale(0) + 16, bar.label, { size: 10 });
  });
  svg.text(MARGIN.left + plotWidth / 2, 20, title, { size: 13 });
  svg.text(MARGIN.left + plotWidth / 2, plotHeight + MARGIN.top + 40, xLabel);
  legend(svg, [['execution', PALETTE[0]], ['planning', PALETTE[1]]], width);
  const totals = {
    planning_us: bars.reduce((acc, b) => acc + b.planning, 0),
    execution_us: bars.reduce((acc, b) => acc + b.execution, 0),
  };
  svg.metadata(totals);
  return { svg: svg.render(), totals };
}

function legend(svg: SvgCanvas, entries: Array<[string, string]>, width: number): void {
  entries.forEach(([label, color], i) => {
    const x = width - MARGIN.right - 110;
    const y = 14 + i * 16;
    svg.rect(x, y - 9, 10, 10, color);
    svg.text(x + 16, y, label, { anchor: 'start', size: 10 });
  });
}

export function renderSweep(text: string): Figure {
  const rows = parseCsv(text, SWEEP_HEADER);
  const bars = rows.map((row) => ({
    label: row.threshold,
    planning: num(row, 'planning_us'),
    execution: num(row, 'execution_us'),
  }));
  return stackedBars(bars, 'Workload totals by re-optimization threshold', 'Q-error threshold');
}

export function renderLadder(text: string): Figure {
  const rows = parseCsv(text, LADDER_HEADER);
  const bars = rows.map((row) => ({
    label: `perfect-(${row.n})`,
    planning: num(row, 'planning_us'),
    execution: num(row, 'execution_us'),
  }));
  return stackedBars(bars, 'Workload totals by cardinality oracle depth', 'oracle answers joins of <= n tables');
}

interface BenchRows {
  configs: string[];
  byQuery: Map<string, Map<string, Row>>;
}

function groupBench(rows: Row[]): BenchRows {
  const configs = [...new Set(rows.map((r) => r.config))];
  const byQuery = new Map<string, Map<string, Row>>();
  for (const row of rows) {
    if (!byQuery.has(row.query_id)) byQuery.set(row.query_id, new Map());
    byQuery.get(row.query_id)!.set(row.config, row);
  }
  return { configs, byQuery };
}

/** Grouped execution-time bars per query, ordered ascending by the
 * baseline (default) config's execution time. */
export function renderPerQuery(text: string, baseline = 'default'): Figure {
  const rows = parseCsv(text, BENCH_HEADER);
  const { configs, byQuery } = groupBench(rows);
  if (!configs.includes(baseline)) {
    throw new SchemaMismatch(`baseline config ${baseline} not present (found ${configs.join(', ')})`);
  }
  const queries = [...byQuery.keys()].sort((a, b) => {
    const ta = num(byQuery.get(a)!.get(baseline)!, 'execution_us');
    const tb = num(byQuery.get(b)!.get(baseline)!, 'execution_us');
    return ta - tb || (a < b ? -1 : 1);
  });
  const groupWidth = Math.max(18, configs.length * 7);
  const width = Math.max(560, MARGIN.left + MARGIN.right + queries.length * (groupWidth + 6));
  const plotWidth = width - MARGIN.left - MARGIN.right;
  const plotHeight = 320;
  const svg = new SvgCanvas(width, plotHeight + MARGIN.top + MARGIN.bottom);
  let peak = 0;
  for (const per of byQuery.values()) {
    for (const row of per.values()) peak = Math.max(peak, num(row, 'execution_us'));
  }
  const scale = drawAxis(svg, peak, plotWidth, plotHeight, 'execution time (ms)');
  const slot = plotWidth / queries.length;
  const barWidth = (slot * 0.8) / configs.length;
  const totals: Record<string, number> = {};
  queries.forEach((qid, qi) => {
    configs.forEach((config, ci) => {
      const row = byQuery.get(qid)!.get(config);
      if (!row) return;
      const value = num(row, 'execution_us');
      totals[config] = (totals[config] ?? 0) + value;
      const x = MARGIN.left + slot * qi + slot * 0.1 + barWidth * ci;
      const y = scale(value);
      svg.rect(x, y, barWidth, scale(0) - y, PALETTE[ci % PALETTE.length], `${qid} ${config}: ${value} us`);
    });
    svg.text(MARGIN.left + slot * qi + slot / 2, scale(0) + 14, qid, { size: 7, rotate: 60 });
  });
  svg.text(MARGIN.left + plotWidth / 2, 20,
    `Per-query execution time, ordered by ${baseline} execution time`, { size: 13 });
  legend(svg, configs.map((c, i) => [c, PALETTE[i % PALETTE.length]] as [string, string]), width);
  svg.metadata(totals);
  return { svg: svg.render(), totals };
}

/** Top-k slice: grouped planning+execution stacks per query and config,
 * queries kept in file order (the harness writes them longest first). */
export function renderTopK(text: string): Figure {
  const rows = parseCsv(text, BENCH_HEADER);
  const { configs, byQuery } = groupBench(rows);
  const queries = [...byQuery.keys()];
  const width = Math.max(560, MARGIN.left + MARGIN.right + queries.length * (configs.length * 14 + 10));
  const plotWidth = width - MARGIN.left - MARGIN.right;
  const plotHeight = 320;
  const svg = new SvgCanvas(width, plotHeight + MARGIN.top + MARGIN.bottom);
  let peak = 0;
  for (const per of byQuery.values()) {
    for (const row of per.values()) {
      peak = Math.max(peak, num(row, 'planning_us') + num(row, 'execution_us'));
    }
  }
  const scale = drawAxis(svg, peak, plotWidth, plotHeight, 'planning + execution (ms)');
  const slot = plotWidth / queries.length;
  const barWidth = (slot * 0.8) / configs.length;
  const totals: Record<string, number> = {};
  queries.forEach((qid, qi) => {
    configs.forEach((config, ci) => {
      const row = byQuery.get(qid)!.get(config);
      if (!row) return;
      const planning = num(row, 'planning_us');
      const execution = num(row, 'execution_us');
      totals[config] = (totals[config] ?? 0) + planning + execution;
      const x = MARGIN.left + slot * qi + slot * 0.1 + barWidth * ci;
      const yExec = scale(execution);
      const yTop = scale(execution + planning);
      svg.rect(x, yExec, barWidth, scale(0) - yExec, PALETTE[ci % PALETTE.length],
        `${qid} ${config} execution: ${execution} us`);
      svg.rect(x, yTop, barWidth, yExec - yTop, '#cccccc', `${qid} ${config} planning: ${planning} us`);
    });
    svg.text(MARGIN.left + slot * qi + slot / 2, scale(0) + 14, qid, { size: 7, rotate: 60 });
  });
  svg.text(MARGIN.left + plotWidth / 2, 20, 'Longest-running queries, planning and execution', { size: 13 });
  legend(svg, configs.map((c, i) => [c, PALETTE[i % PALETTE.length]] as [string, string]), width);
  svg.metadata(totals);
  return { svg: svg.render(), totals };
}

/** Execution time per correction iteration, one polyline per query, with
 * the perfect-estimate time as a dashed reference line. */
export function renderImprovement(text: string): Figure {
  const rows = parseCsv(text, IMPROVEMENT_HEADER);
  const byQuery = new Map<string, Row[]>();
  for (const row of rows) {
    if (!byQuery.has(row.query_id)) byQuery.set(row.query_id, []);
    byQuery.get(row.query_id)!.push(row);
  }
  const width = 560;
  const plotWidth = width - MARGIN.left - MARGIN.right;
  const plotHeight = 300;
  const svg = new SvgCanvas(width, plotHeight + MARGIN.top + MARGIN.bottom);
  let peak = 0;
  let maxIter = 1;
  for (const row of rows) {
    peak = Math.max(peak, num(row, 'execution_us'), num(row, 'perfect_us'));
    maxIter = Math.max(maxIter, num(row, 'iteration'));
  }
  const scale = drawAxis(svg, peak, plotWidth, plotHeight, 'execution time (ms)');
  const xScale = (iter: number) => MARGIN.left + (plotWidth * iter) / Math.max(maxIter, 1);
  const totals: Record<string, number> = {};
  let qi = 0;
  for (const [qid, series] of byQuery) {
    const color = PALETTE[qi % PALETTE.length];
    const sorted = [...series].sort((a, b) => num(a, 'iteration') - num(b, 'iteration'));
    svg.polyline(sorted.map((r) => [xScale(num(r, 'iteration')), scale(num(r, 'execution_us'))]), color);
    const perfect = num(sorted[0], 'perfect_us');
    svg.line(MARGIN.left, scale(perfect), MARGIN.left + plotWidth, scale(perfect), color, '4 3');
    totals[qid] = sorted.reduce((acc, r) => acc + num(r, 'execution_us'), 0);
    qi += 1;
  }
  for (let i = 0; i <= maxIter; i++) {
    svg.text(xScale(i), scale(0) + 16, String(i), { size: 9 });
  }
  svg.text(MARGIN.left + plotWidth / 2, 20, 'Iterative estimate correction (dashed: perfect estimates)', { size: 13 });
  svg.text(MARGIN.left + plotWidth / 2, plotHeight + MARGIN.top + 40, 'correction iteration');
  legend(svg, [...byQuery.keys()].map((q, i) => [q, PALETTE[i % PALETTE.length]] as [string, string]), width);
  svg.metadata(totals);
  return { svg: svg.render(), totals };
}

export function renderFigure(kind: FigureKind, text: string, baseline = 'default'): Figure {
  switch (kind) {
    case 'sweep':
      return renderSweep(text);
    case 'ladder':
      return renderLadder(text);
    case 'per_query':
      return renderPerQuery(text, baseline);
    case 'top_k':
      return renderTopK(text);
    case 'improvement':
      return renderImprovement(text);
  }
}
