import io
import logging

from reportlab.lib import colors
from reportlab.lib.enums import TA_CENTER
from reportlab.lib.pagesizes import A4
from reportlab.lib.styles import ParagraphStyle, getSampleStyleSheet
from reportlab.lib.units import inch
from reportlab.platypus import Paragraph, SimpleDocTemplate, Spacer, Table, TableStyle

from utils.dataset_io import format_cell, record_schema

logger = logging.getLogger(__name__)

FAMILIES = (
    ('Homophily', ('node_homophily', 'regression_homophily', 'continuous_homophily',
                   'continuous_regression_homophily')),
    ('Cross-class neighborhood similarity', ('ccns', 'continuous_ccns')),
)
HOMOPHILY_COLUMNS = ('metric', 'k', 'split', 'mean', 'std', 'excluded')
CCNS_COLUMNS = ('metric', 'k', 'split', 'd_ccns', 'excluded', 'classes')


class MetricReportPDFGenerator:
    def __init__(self):
        self.styles = getSampleStyleSheet()
        self.setup_custom_styles()

    def setup_custom_styles(self):
        """Setup custom styles for the PDF"""
        self.title_style = ParagraphStyle(
            'ReportTitle',
            parent=self.styles['Heading1'],
            fontSize=18,
            spaceAfter=24,
            alignment=TA_CENTER,
            textColor=colors.darkblue
        )
        self.header_style = ParagraphStyle(
            'ReportHeader',
            parent=self.styles['Heading2'],
            fontSize=14,
            spaceAfter=12,
            textColor=colors.darkblue
        )
        self.normal_style = ParagraphStyle(
            'ReportNormal',
            parent=self.styles['Normal'],
            fontSize=10,
            spaceAfter=6
        )

    def table_style(self):
        return TableStyle([
            ('BACKGROUND', (0, 0), (-1, 0), colors.darkblue),
            ('TEXTCOLOR', (0, 0), (-1, 0), colors.whitesmoke),
            ('ALIGN', (0, 0), (-1, -1), 'LEFT'),
            ('FONTNAME', (0, 0), (-1, 0), 'Helvetica-Bold'),
            ('FONTSIZE', (0, 0), (-1, 0), 10),
            ('BOTTOMPADDING', (0, 0), (-1, 0), 8),
            ('GRID', (0, 0), (-1, -1), 0.5, colors.black),
            ('FONTSIZE', (0, 1), (-1, -1), 9),
            ('ROWBACKGROUNDS', (0, 1), (-1, -1), [colors.white, colors.lightgrey]),
            ('VALIGN', (0, 0), (-1, -1), 'TOP')
        ])

    def family_table(self, rows, columns):
        data = [list(columns)]
        data.extend([format_cell(row.get(column)) for column in columns] for row in rows)
        width = 6.5 * inch / len(columns)
        table = Table(data, colWidths=[width] * len(columns), repeatRows=1)
        table.setStyle(self.table_style())
        return table

    def matrix_table(self, row):
        """Class-by-class CCNS block of one record"""
        classes = row.get('classes') or []
        values = row.get('matrix') or []
        size = len(classes)
        data = [[''] + [str(c) for c in classes]]
        for i, c in enumerate(classes):
            data.append([str(c)] + [format_cell(value) for value in values[i * size:(i + 1) * size]])
        table = Table(data, repeatRows=1)
        table.setStyle(self.table_style())
        return table

    def generate_report_pdf(self, records, title='Graph assessment metrics', source=None):
        """Render evaluation records as PDF bytes, one table per metric family"""
        buffer = io.BytesIO()
        doc = SimpleDocTemplate(buffer, pagesize=A4, rightMargin=54, leftMargin=54,
                                topMargin=54, bottomMargin=36, title=title)
        rows = [record_schema.dump(record) for record in records]
        elements = [Paragraph(title, self.title_style)]
        if source:
            elements.append(Paragraph(f'Input: {source}', self.normal_style))
            elements.append(Spacer(1, 12))

        for heading, names in FAMILIES:
            family = [row for row in rows if row['metric'] in names]
            if not family:
                continue
            elements.append(Paragraph(heading, self.header_style))
            if heading == 'Homophily':
                elements.append(self.family_table(family, HOMOPHILY_COLUMNS))
                elements.append(Spacer(1, 18))
                continue
            elements.append(self.family_table(family, CCNS_COLUMNS))
            elements.append(Spacer(1, 12))
            for row in family:
                elements.append(Paragraph(f"{row['metric']} k={row['k']} split={row['split']}", self.normal_style))
                elements.append(self.matrix_table(row))
                elements.append(Spacer(1, 12))

        try:
            doc.build(elements)
            return buffer.getvalue()
        finally:
            buffer.close()

    def write_report_pdf(self, records, path, **kwargs):
        with open(path, 'wb') as handle:
            handle.write(self.generate_report_pdf(records, **kwargs))
        logger.info('wrote PDF report with %d records to %s', len(records), path)


pdf_generator = MetricReportPDFGenerator()
