/** Tiny SVG builder: fixed layout, labeled axes, deterministic output. */

export interface Margin {
  top: number;
  right: number;
  bottom: number;
  left: number;
}

export const MARGIN: Margin = { top: 36, right: 24, bottom: 72, left: 84 };

export function esc(text: string): string {
  return text.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;');
}

export class SvgCanvas {
  private parts: string[] = [];

  constructor(readonly width: number, readonly height: number) {}

  rect(x: number, y: number, w: number, h: number, fill: string, title?: string): void {
    const tooltip = title ? `<title>${esc(title)}</title>` : '';
    this.parts.push(
      `<rect x="${r2(x)}" y="${r2(y)}" width="${r2(w)}" height="${r2(h)}" fill="${fill}">${tooltip}</rect>`,
    );
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke = '#444', dash = ''): void {
    const dashAttr = dash ? ` stroke-dasharray="${dash}"` : '';
    this.parts.push(
      `<line x1="${r2(x1)}" y1="${r2(y1)}" x2="${r2(x2)}" y2="${r2(y2)}" stroke="${stroke}"${dashAttr}/>`,
    );
  }

  polyline(points: Array<[number, number]>, stroke: string, dash = ''): void {
    const attr = dash ? ` stroke-dasharray="${dash}"` : '';
    const path = points.map(([x, y]) => `${r2(x)},${r2(y)}`).join(' ');
    this.parts.push(`<polyline points="${path}" fill="none" stroke="${stroke}" stroke-width="1.5"${attr}/>`);
  }

  text(x: number, y: number, content: string, opts: { anchor?: string; size?: number; rotate?: number } = {}): void {
    const anchor = opts.anchor ?? 'middle';
    const size = opts.size ?? 11;
    const rotate = opts.rotate ? ` transform="rotate(${opts.rotate} ${r2(x)} ${r2(y)})"` : '';
    this.parts.push(
      `<text x="${r2(x)}" y="${r2(y)}" text-anchor="${anchor}" font-size="${size}" font-family="sans-serif"${rotate}>${esc(content)}</text>`,
    );
  }

  metadata(payload: unknown): void {
    this.parts.push(`<metadata id="figure-totals">${esc(JSON.stringify(payload))}</metadata>`);
  }

  render(): string {
    return [
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" height="${this.height}" viewBox="0 0 ${this.width} ${this.height}">`,
      `<rect x="0" y="0" width="${this.width}" height="${this.height}" fill="white"/>`,
      ...this.parts,
      '</svg>',
    ].join('\n');
  }
}

function r2(v: number): string {
  return (Math.round(v * 100) / 100).toString();
}

/** Left axis with tick labels in milliseconds. */
export function drawAxis(
  svg: SvgCanvas,
  maxValue: number,
  plotWidth: number,
  plotHeight: number,
  label: string,
): (value: number) => number {
  const scale = (value: number) => MARGIN.top + plotHeight - (value / maxValue) * plotHeight;
  svg.line(MARGIN.left, MARGIN.top, MARGIN.left, MARGIN.top + plotHeight);
  svg.line(MARGIN.left, MARGIN.top + plotHeight, MARGIN.left + plotWidth, MARGIN.top + plotHeight);
  const ticks = 5;
  for (let i = 0; i <= ticks; i++) {
    const value = (maxValue * i) / ticks;
    const y = scale(value);
    svg.line(MARGIN.left - 4, y, MARGIN.left, y);
    svg.text(MARGIN.left - 8, y + 4, `${(value / 1000).toFixed(1)}`, { anchor: 'end', size: 10 });
  }
  svg.text(16, MARGIN.top + plotHeight / 2, label, { rotate: -90, size: 11 });
  return scale;
}

export const PALETTE = ['#4878a8', '#e49444', '#5ca453', '#c44e52', '#8172b3', '#937860'];
