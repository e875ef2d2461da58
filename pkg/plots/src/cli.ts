/** Render a harness CSV as an SVG figure.
 *
 * Usage:
 *   node dist/cli.js --kind sweep --input sweep.csv --output sweep.svg
 *   node dist/cli.js --kind per_query --input bench.csv --output fig.svg --baseline default
 *
 * Kinds: sweep | ladder | per_query | top_k | improvement
 */
import * as fs from 'node:fs';
import * as process from 'node:process';

import { EmptyInput, SchemaMismatch } from './csv.js';
import { FigureKind, renderFigure } from './figures.js';

const KINDS: FigureKind[] = ['sweep', 'ladder', 'per_query', 'top_k', 'improvement'];

function parseArgs(argv: string[]): Map<string, string> {
  const args = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    const value = argv[i + 1];
    if (!key.startsWith('--') || value === undefined) {
      throw new Error(`malformed arguments near ${key}`);
    }
    args.set(key.slice(2), value);
  }
  return args;
}

export function main(argv: string[]): number {
  let args: Map<string, string>;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(String(err));
    return 1;
  }
  const kind = args.get('kind') as FigureKind | undefined;
  const input = args.get('input');
  const output = args.get('output');
  if (!kind || !KINDS.includes(kind) || !input || !output) {
    console.error(`usage: plot --kind <${KINDS.join('|')}> --input report.csv --output figure.svg [--baseline config]`);
    return 1;
  }
  try {
    const text = fs.readFileSync(input, 'utf-8');
    const figure = renderFigure(kind, text, args.get('baseline') ?? 'default');
    fs.writeFileSync(output, figure.svg);
    console.log(`wrote ${output}`);
    console.log(`totals: ${JSON.stringify(figure.totals)}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaMismatch || err instanceof EmptyInput) {
      console.error(`${err.constructor.name}: ${err.message}`);
      return 2;
    }
    console.error(String(err));
    return 2;
  }
}

process.exit(main(process.argv.slice(2)));
